#pragma once

#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace sgspline {

/// Dense row-major d-dimensional array of doubles (last index fastest).
class NdArray {
 public:
  NdArray() = default;
  explicit NdArray(std::vector<std::size_t> extents, double fill = 0.0)
      : extents_(std::move(extents)),
        data_(std::accumulate(extents_.begin(), extents_.end(), std::size_t{1},
                              std::multiplies<>()),
              fill) {}

  std::size_t rank() const noexcept { return extents_.size(); }
  std::size_t extent(std::size_t axis) const { return extents_.at(axis); }
  const std::vector<std::size_t>& extents() const noexcept { return extents_; }
  std::size_t size() const noexcept { return data_.size(); }

  /// Distance between consecutive entries along `axis`.
  std::size_t stride(std::size_t axis) const {
    std::size_t s = 1;
    for (std::size_t i = axis + 1; i < extents_.size(); ++i) s *= extents_[i];
    return s;
  }

  std::size_t flat_index(std::span<const std::size_t> index) const {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < extents_.size(); ++i) flat = flat * extents_[i] + index[i];
    return flat;
  }

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  NdArray& operator+=(const NdArray& other) {
    check_same_shape(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }
  NdArray& operator-=(const NdArray& other) {
    check_same_shape(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
  }
  NdArray& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }
  /// this += s * other
  void axpy(double s, const NdArray& other) {
    check_same_shape(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * other.data_[i];
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, v < 0 ? -v : v);
    return m;
  }

 private:
  void check_same_shape(const NdArray& other) const {
    if (other.extents_ != extents_) throw std::invalid_argument("NdArray: shape mismatch");
  }

  std::vector<std::size_t> extents_;
  std::vector<double> data_;
};

/// Calls `fn(index)` for every multi-index of a box with the given extents, last index fastest.
template <class Fn>
void for_each_index(std::span<const std::size_t> extents, Fn&& fn) {
  const std::size_t d = extents.size();
  for (std::size_t e : extents)
    if (e == 0) return;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    fn(std::span<const std::size_t>(idx));
    std::size_t k = d;
    while (k > 0) {
      --k;
      if (++idx[k] < extents[k]) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (d == 0) return;
  }
}

}  // namespace sgspline

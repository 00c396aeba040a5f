#pragma once

// Data-parallel inner loops. Every kernel has a plain serial path, kept as the
// reference the OpenMP path is tested and benchmarked against.

#include "sgspline/ndarray.hpp"
#include "sgspline/targets.hpp"

#include <omp.h>

#include <cstdint>
#include <span>
#include <vector>

namespace sgspline {

enum class Execution { Serial, Parallel };

namespace kernels {

struct FiberShape {
  std::size_t outer = 1;  // product of extents before the axis
  std::size_t inner = 1;  // product of extents after the axis
};

inline FiberShape fiber_shape(const NdArray& a, std::size_t axis) {
  FiberShape s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= a.extent(i);
  s.inner = a.stride(axis);
  return s;
}

/// Applies op(in_fiber, out_fiber) to every 1-D fiber along `axis`.
/// `out` must match `in` except along `axis`. op must be safe to call concurrently.
template <class Op>
void transform_fibers(const NdArray& in, NdArray& out, std::size_t axis, Op&& op,
                      Execution exec = Execution::Parallel) {
  const FiberShape s = fiber_shape(in, axis);
  const std::size_t n_in = in.extent(axis);
  const std::size_t n_out = out.extent(axis);
  const std::int64_t fibers = static_cast<std::int64_t>(s.outer * s.inner);
  const auto src = in.data();
  auto dst = out.data();

  auto run = [&](std::int64_t f, std::vector<double>& a, std::vector<double>& b) {
    const std::size_t o = static_cast<std::size_t>(f) / s.inner;
    const std::size_t i = static_cast<std::size_t>(f) % s.inner;
    const std::size_t base_in = o * n_in * s.inner + i;
    const std::size_t base_out = o * n_out * s.inner + i;
    for (std::size_t k = 0; k < n_in; ++k) a[k] = src[base_in + k * s.inner];
    op(std::span<const double>(a), std::span<double>(b));
    for (std::size_t k = 0; k < n_out; ++k) dst[base_out + k * s.inner] = b[k];
  };

  if (exec == Execution::Serial || fibers < 64) {
    std::vector<double> a(n_in), b(n_out);
    for (std::int64_t f = 0; f < fibers; ++f) run(f, a, b);
    return;
  }
#pragma omp parallel
  {
    std::vector<double> a(n_in), b(n_out);
#pragma omp for schedule(static)
    for (std::int64_t f = 0; f < fibers; ++f) run(f, a, b);
  }
}

/// sum_I (prod_k w_k[I_k]) * v_I^2 over a tensor grid. Partial sums are formed per
/// leading index and combined in order, so the result does not depend on the thread count.
inline double weighted_sum_squares(const NdArray& values,
                                   const std::vector<std::span<const double>>& weights,
                                   Execution exec = Execution::Parallel) {
  const std::size_t d = values.rank();
  if (d == 0) return 0.0;
  const std::size_t lead = values.extent(0);
  const std::size_t block = values.stride(0);
  std::vector<double> partial(lead, 0.0);
  const auto v = values.data();

  auto row = [&](std::int64_t i0) {
    // Weight of the trailing multi-index, accumulated incrementally.
    std::vector<std::size_t> idx(d, 0);
    double acc = 0.0;
    const std::size_t base = static_cast<std::size_t>(i0) * block;
    for (std::size_t f = 0; f < block; ++f) {
      double w = 1.0;
      for (std::size_t k = 1; k < d; ++k) w *= weights[k][idx[k]];
      const double x = v[base + f];
      acc += w * x * x;
      for (std::size_t k = d; k-- > 1;) {
        if (++idx[k] < values.extent(k)) break;
        idx[k] = 0;
      }
    }
    partial[static_cast<std::size_t>(i0)] = acc * weights[0][static_cast<std::size_t>(i0)];
  };

  const std::int64_t n = static_cast<std::int64_t>(lead);
  if (exec == Execution::Serial) {
    for (std::int64_t i = 0; i < n; ++i) row(i);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) row(i);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

/// D^alpha f sampled on the tensor grid nodes[0] x ... x nodes[d-1].
inline NdArray sample_target(const Target& f, const std::vector<std::span<const double>>& nodes,
                             std::span<const int> alpha, Execution exec = Execution::Parallel) {
  const std::size_t d = nodes.size();
  std::vector<std::size_t> ext(d);
  for (std::size_t k = 0; k < d; ++k) ext[k] = nodes[k].size();
  NdArray out(ext);
  if (out.size() == 0) return out;
  const std::size_t lead = ext[0];
  const std::size_t block = out.stride(0);
  auto data = out.data();

  auto row = [&](std::int64_t i0) {
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> x(d);
    x[0] = nodes[0][static_cast<std::size_t>(i0)];
    const std::size_t base = static_cast<std::size_t>(i0) * block;
    for (std::size_t flat = 0; flat < block; ++flat) {
      for (std::size_t k = 1; k < d; ++k) x[k] = nodes[k][idx[k]];
      data[base + flat] = f.derivative(x, alpha);
      for (std::size_t k = d; k-- > 1;) {
        if (++idx[k] < ext[k]) break;
        idx[k] = 0;
      }
    }
  };

  const std::int64_t n = static_cast<std::int64_t>(lead);
  if (exec == Execution::Serial) {
    for (std::int64_t i = 0; i < n; ++i) row(i);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) row(i);
  }
  return out;
}

}  // namespace kernels
}  // namespace sgspline

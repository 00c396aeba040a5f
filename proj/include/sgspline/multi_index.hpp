#pragma once

#include <string>
#include <vector>

namespace sgspline {

/// Per-direction levels, derivative orders or basis indices.
using MultiIndex = std::vector<int>;

inline int l1_norm(const MultiIndex& m) {
  int s = 0;
  for (int v : m) s += v;
  return s;
}

inline int max_entry(const MultiIndex& m) {
  int s = 0;
  for (int v : m) s = v > s ? v : s;
  return s;
}

/// "3-2-1" style label.
inline std::string to_string(const MultiIndex& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(m[i]);
  }
  return s;
}

}  // namespace sgspline

#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hkt {

/// Uniform periodic grid on the torus R^{4n}/Z^{4n} (unit side). Fields are
/// constant along inactive axes, so storage covers only the active ones,
/// C-contiguous with the last active axis fastest.
struct TorusGrid {
  int n = 0;
  uint32_t active_mask = 0;
  int N = 0;

  int dim() const { return std::popcount(active_mask); }

  long points() const {
    long p = 1;
    for (int i = 0; i < dim(); ++i) p *= N;
    return p;
  }

  bool axis_active(int m) const { return (active_mask >> m) & 1u; }

  std::vector<int> axes() const {
    std::vector<int> out;
    for (int m = 0; m < 4 * n; ++m)
      if (axis_active(m)) out.push_back(m);
    return out;
  }

  double spacing() const { return 1.0 / N; }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;
};

inline TorusGrid make_grid(int n, uint32_t active_mask, int N) {
  if (n < 1) throw std::invalid_argument("make_grid: n must be >= 1");
  if (N < 4 || N % 2 != 0) throw std::invalid_argument("make_grid: N must be even and >= 4");
  if (active_mask >> (4 * n)) throw std::invalid_argument("make_grid: axis outside 0..4n-1");
  return {n, active_mask, N};
}

/// Signed Fourier frequency of index i on an axis of N points.
inline int grid_freq(int i, int N) { return (i <= N / 2) ? i : i - N; }

}  // namespace hkt

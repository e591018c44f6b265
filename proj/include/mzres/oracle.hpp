#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "mzres/resonator.hpp"

namespace mzres {

namespace detail {

// cos(q a) - i k sin(q a)/q with q = sqrt(k^2 - v). Even in q, so the
// branch of the square root is irrelevant; zeros coincide with those of
// q cot(q a) - i k.
inline cplx swave_function(double a, cplx v, cplx k) {
  const cplx q = std::sqrt(k * k - v);
  const cplx x = q * a;
  const cplx sinc = std::abs(x) < 1e-4 ? a * (1.0 - x * x / 6.0) : std::sin(x) / q;
  return std::cos(x) - cplx(0.0, 1.0) * k * sinc;
}

}  // namespace detail

/// Zeros of the s-wave square-well condition q cot(q a) = i k (d = 3,
/// single shell of value v) inside the box, found from local minima of the
/// modulus on a 400 x 400 grid and polished by Newton's method.
inline std::vector<cplx> swave_oracle(double a, cplx v, const Box& box, int grid = 400) {
  const int n = grid;
  const double hx = box.width() / (n - 1), hy = box.height() / (n - 1);
  std::vector<double> mod(static_cast<std::size_t>(n) * n);
  auto at = [&](int i, int j) -> double& { return mod[static_cast<std::size_t>(i) * n + j]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      at(i, j) = std::abs(detail::swave_function(a, v, {box.x0 + i * hx, box.y0 + j * hy}));

  std::vector<cplx> out;
  const double merge = 1e-7 * std::max(1.0, std::max(std::abs(box.x0), std::abs(box.x1)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int ii = i + di, jj = j + dj;
          if ((di || dj) && ii >= 0 && ii < n && jj >= 0 && jj < n && at(ii, jj) < at(i, j)) {
            is_min = false;
            break;
          }
        }
      if (!is_min) continue;
      cplx k(box.x0 + i * hx, box.y0 + j * hy);
      bool ok = false;
      for (int it = 0; it < 100; ++it) {
        const double h = 1e-6 * std::max(1.0, std::abs(k));
        const cplx f = detail::swave_function(a, v, k);
        const cplx df = (detail::swave_function(a, v, k + h) - detail::swave_function(a, v, k - h)) /
                        (2.0 * h);
        if (df == cplx(0.0, 0.0)) break;
        const cplx dk = f / df;
        k -= dk;
        if (std::abs(dk) < 1e-14 * std::max(1.0, std::abs(k))) {
          ok = true;
          break;
        }
      }
      if (!ok || !box.contains(k)) continue;
      bool dup = false;
      for (const auto& z : out) dup = dup || std::abs(z - k) < merge;
      if (!dup) out.push_back(k);
    }
  std::sort(out.begin(), out.end(), [](cplx p, cplx q) {
    return p.real() != q.real() ? p.real() < q.real() : p.imag() < q.imag();
  });
  return out;
}

}  // namespace mzres

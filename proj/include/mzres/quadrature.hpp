#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "mzres/error.hpp"

namespace mzres::quad {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

// 21-point Kronrod abscissae (descending, last is the centre) and weights,
// with the embedded 10-point Gauss weights (Gauss nodes are xgk[1,3,...,9]).
inline constexpr std::array<double, 11> xgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> wgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

}  // namespace detail

/// Single Gauss-Kronrod 10/21 panel on [a, b].
template <class F>
Estimate gk21(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = detail::wgk[10] * fc;
  double resg = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double dx = h * detail::xgk[j];
    const double s = f(c - dx) + f(c + dx);
    resk += detail::wgk[j] * s;
    if (j % 2 == 1) resg += detail::wg[j / 2] * s;
  }
  return {resk * h, std::abs((resk - resg) * h)};
}

struct Options {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_panels = 20000;
};

/// Globally adaptive Gauss-Kronrod integration over [a, b]. The initial
/// panel split points in `breaks` (strictly inside (a, b)) are honoured.
/// Throws QuadratureError when the panel budget runs out before the
/// requested tolerance is met.
template <class F>
Estimate integrate(const F& f, double a, double b, Options opt = {},
                   const std::vector<double>& breaks = {}) {
  if (a == b) return {};
  struct Panel {
    double a, b;
    Estimate est;
    bool operator<(const Panel& o) const { return est.error < o.est.error; }
  };
  std::priority_queue<Panel> heap;
  std::vector<double> pts{a};
  for (double x : breaks)
    if ((x - a) * (b - x) > 0) pts.push_back(x);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end(), [a, b](double x, double y) {
    return a < b ? x < y : x > y;
  });
  double total = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    Panel p{pts[i], pts[i + 1], gk21(f, pts[i], pts[i + 1])};
    total += p.est.value;
    err += p.est.error;
    heap.push(p);
  }
  int panels = static_cast<int>(heap.size());
  while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (panels >= opt.max_panels) {
      throw QuadratureError("adaptive quadrature did not converge on [" +
                            std::to_string(a) + ", " + std::to_string(b) +
                            "], error estimate " + std::to_string(err));
    }
    Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (m == p.a || m == p.b) {
      // Panel cannot be split further in double precision; accept it.
      err -= p.est.error;
      p.est.error = 0.0;
      heap.push(p);
      continue;
    }
    Panel l{p.a, m, gk21(f, p.a, m)};
    Panel r{m, p.b, gk21(f, m, p.b)};
    total += l.est.value + r.est.value - p.est.value;
    err += l.est.error + r.est.error - p.est.error;
    heap.push(l);
    heap.push(r);
    ++panels;
  }
  // Re-sum to shed accumulated rounding from the running updates.
  double sum = 0.0, esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().est.value;
    esum += heap.top().est.error;
    heap.pop();
  }
  return {sum, esum};
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace mzres::quad

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "mzres/chebyshev.hpp"
#include "mzres/error.hpp"

namespace mzres {

using cplx = std::complex<double>;

/// A point of the closed upper half-plane with the origin removed.
class UpperPoint {
 public:
  explicit UpperPoint(cplx z) : z_(z) {
    if (!(z.imag() >= 0.0) || z == cplx(0.0, 0.0))
      throw DomainError("point must satisfy Im z >= 0 and z != 0");
  }
  UpperPoint(double x, double y) : UpperPoint(cplx(x, y)) {}
  cplx value() const { return z_; }

 private:
  cplx z_;
};

namespace detail {

// sqrt(1 - z^2) on the closed upper half-plane. Real |x| > 1 is taken as the
// limit from above: 1 - (x + i0)^2 = 1 - x^2 - i0 sign(x).
inline cplx sqrt_one_minus_sq(cplx z) {
  if (z.imag() == 0.0) {
    const double x = z.real();
    const double s = 1.0 - x * x;
    if (s >= 0.0) return {std::sqrt(s), 0.0};
    return {0.0, -std::copysign(std::sqrt(-s), x)};
  }
  // (1 - z)(1 + z) avoids cancellation of 1 - z^2 near z = +-1.
  return std::sqrt((1.0 - z) * (1.0 + z));
}

// log z with arg in [0, pi] for z on the closed upper half-plane.
inline cplx log_upper(cplx z) {
  return {std::log(std::abs(z)), std::atan2(std::abs(z.imag()), z.real())};
}

}  // namespace detail

/// rho(z) = log((1 + w) / z) - w with w = sqrt(1 - z^2), continuous on the
/// closed upper half-plane minus the origin. The logarithm is split as
/// log(1 + w) - log z; Re(1 + w) > 0 so both pieces are principal and the
/// result is continuous, and it matches the real formula on (0, 1).
inline cplx rho(const UpperPoint& p) {
  const cplx z = p.value();
  const cplx w = detail::sqrt_one_minus_sq(z);
  return std::log(1.0 + w) - detail::log_upper(z) - w;
}

/// rho'(z) = -sqrt(1 - z^2) / z on the same branch as rho.
inline cplx rho_prime(const UpperPoint& p) {
  const cplx z = p.value();
  return -detail::sqrt_one_minus_sq(z) / z;
}

inline double re_rho_ray(double t, double theta) {
  return rho(UpperPoint(std::polar(t, theta))).real();
}

/// Radius r0(theta) of the zero curve of Re rho on the ray of angle theta.
/// Re rho > 0 inside and < 0 outside. Bisection down to 1e-3, then Newton
/// with d/dr Re rho(r e^{i theta}) = Re(e^{i theta} rho'); near the real
/// axis, where rho' vanishes like a square root, bisection runs to the end.
inline double sigma_radius(double theta, double tol = 1e-14) {
  if (!(theta > 0.0 && theta < M_PI))
    throw DomainError("sigma_radius requires 0 < theta < pi");
  if (!(tol > 0.0)) throw DomainError("sigma_radius requires tol > 0");
  double lo = 0.5, hi = 1.0;
  if (re_rho_ray(lo, theta) <= 0.0)
    throw NoBracket("Re rho not positive at r = 1/2 for theta = " +
                    std::to_string(theta));
  while (re_rho_ray(hi, theta) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6)
      throw NoBracket("no sign change of Re rho for theta = " +
                      std::to_string(theta));
  }
  const double s = std::sin(std::min(theta, M_PI - theta));
  const bool bisect_only = s < 1e-2;
  const double switch_width = bisect_only ? 0.0 : 1e-3;
  while (hi - lo > std::max(switch_width, 4e-16 * hi)) {
    const double mid = 0.5 * (lo + hi);
    if (re_rho_ray(mid, theta) > 0.0) lo = mid; else hi = mid;
    if (bisect_only && hi - lo <= tol * 1e-2) break;
  }
  if (bisect_only) return 0.5 * (lo + hi);
  const cplx e = std::polar(1.0, theta);
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    const cplx z = r * e;
    const double f = rho(UpperPoint(z)).real();
    const double df = (e * rho_prime(UpperPoint(z))).real();
    const double step = f / df;
    double next = r - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (re_rho_ray(next, theta) > 0.0) lo = next; else hi = next;
    const bool done = std::abs(next - r) <= 1e-15 * r;
    r = next;
    if (done || hi - lo <= 1e-15 * hi) break;
  }
  return r;
}

/// The zero curve r = r0(theta), stored as a Chebyshev interpolant in
/// theta on (0, pi) together with its nodes.
class SigmaCurve {
 public:
  SigmaCurve() = default;

  static SigmaCurve build(int nnodes, double tol = 1e-14) {
    if (nnodes < 16) throw DomainError("build_sigma requires nnodes >= 16");
    SigmaCurve s;
    const auto x = ChebSeries::nodes(nnodes);
    s.theta_.resize(nnodes);
    s.r0_.resize(nnodes);
    for (int j = 0; j < nnodes; ++j) {
      s.theta_[j] = 0.5 * M_PI * (1.0 + x[j]);
      s.r0_[j] = sigma_radius(s.theta_[j], tol);
    }
    s.series_ = ChebSeries::interpolate(s.r0_);
    return s;
  }

  static SigmaCurve from_nodes(std::vector<double> theta, std::vector<double> r0) {
    SigmaCurve s;
    s.theta_ = std::move(theta);
    s.r0_ = std::move(r0);
    s.series_ = ChebSeries::interpolate(s.r0_);
    return s;
  }

  double operator()(double theta) const {
    for (std::size_t j = 0; j < theta_.size(); ++j)
      if (theta == theta_[j]) return r0_[j];
    return series_(2.0 * theta / M_PI - 1.0);
  }

  const std::vector<double>& node_angles() const { return theta_; }
  const std::vector<double>& node_radii() const { return r0_; }

 private:
  std::vector<double> theta_, r0_;
  ChebSeries series_;
};

}  // namespace mzres

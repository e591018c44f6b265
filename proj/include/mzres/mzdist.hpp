#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "mzres/complexfn.hpp"
#include "mzres/geometry.hpp"
#include "mzres/profile.hpp"
#include "mzres/quadrature.hpp"

namespace mzres {

/// The limit distribution mu_MZ = mu0 + mu_minus for odd dimension d.
///
/// mu0 lives on the real axis with density e_d |x|^{d-1} / (2 pi c_d);
/// mu_minus lives on the open lower half-plane with density
/// kappa(r e^{i theta}) = r^{d-2} [d^2 h_d(|theta|) + h_d''(|theta|)] / (2 pi c_d).
class MZDistribution {
 public:
  MZDistribution() = default;

  MZDistribution(AngularProfile profile, SigmaCurve sigma)
      : d_(profile.dimension()),
        profile_(std::move(profile)),
        sigma_(std::move(sigma)),
        e_d_(e_const(d_)),
        c_d_(d_ / (2.0 * M_PI) * profile_.integral(M_PI)) {
    build_sampler_table();
  }

  static MZDistribution build(int d, double tol = 1e-9) {
    return MZDistribution(AngularProfile::build(d, tol), SigmaCurve::build(64));
  }

  int dimension() const { return d_; }
  double e_d() const { return e_d_; }
  double c_d() const { return c_d_; }
  const AngularProfile& profile() const { return profile_; }
  const SigmaCurve& sigma() const { return sigma_; }

  /// Density of mu_minus, extended to the upper half-plane by kappa(conj z) = kappa(z).
  double kappa(cplx z) const {
    if (z.imag() == 0.0) throw DomainError("kappa is undefined on the real axis");
    const double theta = std::abs(std::arg(z));
    return std::pow(std::abs(z), d_ - 2) * profile_.angular_density(theta) /
           (2.0 * M_PI * c_d_);
  }

  double mu0_density(double x) const {
    return e_d_ / (2.0 * M_PI * c_d_) * std::pow(std::abs(x), d_ - 1);
  }

  /// mu0([x1, x2]) from the antiderivative of |x|^{d-1}.
  double mu0_mass(double x1, double x2) const {
    auto F = [this](double x) { return std::copysign(std::pow(std::abs(x), d_), x); };
    return e_d_ / (2.0 * M_PI * c_d_ * d_) * (F(x2) - F(x1));
  }

  /// H(z) = |z|^d h_d(|arg z|) / c_d.
  double potential_H(cplx z) const {
    if (z == cplx(0.0, 0.0)) return 0.0;
    return std::pow(std::abs(z), d_) * profile_.h(std::abs(std::arg(z))) / c_d_;
  }

  /// H_Z vanishes on the open upper half-plane and equals H on its complement.
  double potential_HZ(cplx z) const { return z.imag() > 0.0 ? 0.0 : potential_H(z); }

  /// mu_MZ(Omega(theta1, theta2)); the endpoint derivatives at 0 and pi are
  /// the one-sided limits.
  double sector_mass(const Sector& s) const {
    const double d2 = d_ * d_;
    return (profile_.dh(s.theta2) - profile_.dh(s.theta1) +
            d2 * (profile_.integral(s.theta2) - profile_.integral(s.theta1))) /
           (2.0 * M_PI * d_ * c_d_);
  }

  /// Sector coefficient with c(0) = c(pi) = 0; equals the sector mass plus
  /// the mu0 mass of any real radius bounding the sector.
  double corollary_coefficient(const Sector& s) const {
    auto c = [this](double t) { return (t == 0.0 || t == M_PI) ? 0.0 : profile_.dh(t); };
    const double d2 = d_ * d_;
    return (c(s.theta2) - c(s.theta1) +
            d2 * (profile_.integral(s.theta2) - profile_.integral(s.theta1))) /
           (2.0 * M_PI * d_ * c_d_);
  }

  /// mu_MZ(W) for the chosen variant of the window. The area part integrates
  /// kappa in polar coordinates about the origin: the radial integral of
  /// r^{d-1} is exact, the angular one is adaptive Gauss-Kronrod.
  double window_mass(const Window& w, Variant v = Variant::Open) const {
    std::vector<double> breaks;
    for (double a : w.critical_angles())
      if (a > -M_PI && a < 0.0) breaks.push_back(a);
    breaks.push_back(-0.5 * M_PI);
    auto f = [&](double alpha) {
      double radial = 0.0;
      for (const auto& iv : w.ray_intervals(alpha))
        radial += std::pow(iv.hi, d_) - std::pow(iv.lo, d_);
      if (radial == 0.0) return 0.0;
      return profile_.angular_density(-alpha) * radial;
    };
    const double area =
        quad::integrate(f, -M_PI, 0.0, {1e-11, 1e-11, 200000}, breaks).value /
        (2.0 * M_PI * d_ * c_d_);
    double line = 0.0;
    if (v != Variant::LowerOpen)
      for (const auto& iv : w.real_intervals(v == Variant::Closed))
        line += mu0_mass(iv.lo, iv.hi);
    return area + line;
  }

  /// Mass of the radial real segments [-1, 0] and [0, 1].
  double mu0_radius_mass() const { return e_d_ / (2.0 * M_PI * d_ * c_d_); }

  /// i.i.d. draws from mu_MZ restricted to the closed lower unit half-disc.
  std::vector<cplx> sample(std::size_t n, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return ((rng() >> 11) + 0.5) * 0x1.0p-53; };
    const double p0 = 2.0 * mu0_radius_mass();
    std::vector<cplx> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double pick = uniform();
      if (pick < p0) {
        const double x = std::pow(uniform(), 1.0 / d_);
        out.emplace_back(uniform() < 0.5 ? -x : x, 0.0);
      } else {
        const double alpha = invert_angular_cdf(uniform());
        const double r = std::pow(uniform(), 1.0 / d_);
        out.push_back(std::polar(r, -alpha));
      }
    }
    return out;
  }

  /// Cumulative angular mass G(alpha) = d^2 int_0^alpha h + h'(alpha) - h'(0).
  double angular_cdf(double alpha) const {
    return d_ * d_ * profile_.integral(alpha) + profile_.dh(alpha) - profile_.dh(0.0);
  }

 private:
  void build_sampler_table() {
    constexpr int n = 2048;
    table_alpha_.resize(n + 1);
    table_g_.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
      table_alpha_[i] = AngularProfile::theta_of_x(-1.0 + 2.0 * i / n);
      table_g_[i] = angular_cdf(table_alpha_[i]);
    }
    for (int i = 1; i <= n; ++i) table_g_[i] = std::max(table_g_[i], table_g_[i - 1]);
  }

  double invert_angular_cdf(double u) const {
    const double target = u * table_g_.back();
    auto it = std::upper_bound(table_g_.begin(), table_g_.end(), target);
    std::size_t hi = std::min<std::size_t>(it - table_g_.begin(), table_g_.size() - 1);
    std::size_t lo = hi == 0 ? 0 : hi - 1;
    double a = table_alpha_[lo], b = table_alpha_[hi];
    for (int it2 = 0; it2 < 40 && b - a > 1e-14; ++it2) {
      const double m = 0.5 * (a + b);
      if (angular_cdf(m) < target) a = m; else b = m;
    }
    return 0.5 * (a + b);
  }

  int d_ = 0;
  AngularProfile profile_;
  SigmaCurve sigma_;
  double e_d_ = 0.0;
  double c_d_ = 0.0;
  std::vector<double> table_alpha_, table_g_;
};

/// c_d = (d / 2pi) int_0^pi h_d from the profile antiderivative.
inline double c_const(const AngularProfile& p) {
  return p.dimension() / (2.0 * M_PI) * p.integral(M_PI);
}

/// c_d from the planar integral
///   (2d / (pi (d-2)!)) int_{Im z > 0} max(-Re rho(z), 0) / |z|^{d+2} dx dy,
/// evaluated in polar form without using the zero curve or the profile.
inline double c_const_planar(int d, double rel_tol = 1e-10) {
  require_odd_dimension(d);
  auto inner = [d](double theta) {
    const cplx e = std::polar(1.0, theta);
    auto f = [&](double u) {
      const double v = -rho(UpperPoint(e / u)).real();
      return v > 0.0 ? v * std::pow(u, d - 1) : 0.0;
    };
    // The positive part lives on u < 1/r0 <= 2.
    return quad::integrate(f, 0.0, 2.0, {1e-14, 1e-12, 200000}, {1.0, 1.5}).value;
  };
  const double angular =
      quad::integrate(inner, 0.0, M_PI, {1e-14, rel_tol, 20000}, {0.5 * M_PI}).value;
  return 2.0 * d / (M_PI * factorial(d - 2)) * angular;
}

}  // namespace mzres

#pragma once

#include <cmath>
#include <complex>
#include <thread>
#include <vector>

#include "mzres/chebyshev.hpp"
#include "mzres/complexfn.hpp"
#include "mzres/error.hpp"
#include "mzres/quadrature.hpp"

namespace mzres {

inline double factorial(int n) { return std::exp(std::lgamma(n + 1.0)); }

/// e_d = sqrt(pi) Gamma((d-1)/2) / ((d-2)! Gamma(1 + d/2)).
inline double e_const(int d) {
  require_odd_dimension(d);
  const double log_e = 0.5 * std::log(M_PI) + std::lgamma(0.5 * (d - 1)) -
                       std::lgamma(d - 1.0) - std::lgamma(1.0 + 0.5 * d);
  return std::exp(log_e);
}

/// Values of h_d, h_d' and h_d'' at one angle, straight from the ray
/// integrals (no interpolation).
struct ProfileSample {
  double h = 0.0;
  double dh = 0.0;
  double ddh = 0.0;
};

/// Ray integrals over t in [r0(theta), inf), computed in the variable
/// u = 1/t on [0, 1/r0]:
///   h   = K int (-Re rho(z)) t^{-d-1} dt
///   h'  = K int (-Im w(z))   t^{-d-1} dt
///   h'' = K int Re(z^2 / w)  t^{-d-1} dt + K (Im w0)^2 / (Re w0 r0^d)
/// with z = t e^{i theta}, w = sqrt(1 - z^2), K = 4/(d-2)! and w0 = w on the
/// zero curve. The last term is the moving-endpoint contribution
/// r0'(theta) Im w0 / r0^{d+1} with r0' = r0 Im w0 / Re w0.
inline ProfileSample profile_sample(int d, double theta, double abs_tol = 1e-13) {
  require_odd_dimension(d);
  if (!(theta > 0.0 && theta < M_PI))
    throw DomainError("profile_sample requires 0 < theta < pi");
  const double K = 4.0 / factorial(d - 2);
  const double r0 = sigma_radius(theta);
  const double umax = 1.0 / r0;
  const cplx e = std::polar(1.0, theta);
  std::vector<double> breaks;
  const double c = std::abs(std::cos(theta));
  if (c > 0.0 && 1.0 / c < umax) breaks.push_back(1.0 / c);
  breaks.push_back(0.5 * umax);
  breaks.push_back(0.9 * umax);
  breaks.push_back(0.99 * umax);
  quad::Options opt{abs_tol, 1e-13, 50000};
  auto upow = [d](double u) { return std::pow(u, d - 1); };
  auto fh = [&](double u) {
    const cplx z = e / u;
    return -rho(UpperPoint(z)).real() * upow(u);
  };
  auto fdh = [&](double u) {
    const cplx z = e / u;
    return -detail::sqrt_one_minus_sq(z).imag() * upow(u);
  };
  auto fddh = [&](double u) {
    const cplx z = e / u;
    return (z * z / detail::sqrt_one_minus_sq(z)).real() * upow(u);
  };
  ProfileSample s;
  try {
    s.h = K * quad::integrate(fh, 0.0, umax, opt, breaks).value;
    s.dh = K * quad::integrate(fdh, 0.0, umax, opt, breaks).value;
    const cplx w0 = detail::sqrt_one_minus_sq(r0 * e);
    const double edge = w0.imag() * w0.imag() / (w0.real() * std::pow(r0, d));
    s.ddh = K * (quad::integrate(fddh, 0.0, umax, opt, breaks).value + edge);
  } catch (const QuadratureError& err) {
    throw QuadratureError(std::string(err.what()) + " at theta = " +
                          std::to_string(theta));
  }
  return s;
}

/// Chebyshev representation of h_d, h_d', h_d'' on [0, pi].
///
/// The series live in the variable x in [-1, 1] with
///   theta = (pi/2) (1 - cos phi),  phi = (pi/2)(x + 1),
/// so half-integer powers of theta and of (pi - theta) at the endpoints
/// become analytic in x. Each derivative is fitted from its own ray
/// integral; nothing is differentiated numerically.
class AngularProfile {
 public:
  AngularProfile() = default;

  static double x_of_theta(double theta) {
    const double t = std::clamp(theta, 0.0, M_PI);
    return 2.0 * std::acos(1.0 - 2.0 * t / M_PI) / M_PI - 1.0;
  }
  static double theta_of_x(double x) {
    return 0.5 * M_PI * (1.0 - std::cos(0.5 * M_PI * (x + 1.0)));
  }
  static double dtheta_dx(double x) {
    return 0.25 * M_PI * M_PI * std::sin(0.5 * M_PI * (x + 1.0));
  }

  static AngularProfile build(int d, double tol, int nodes = 0, int threads = 0) {
    require_odd_dimension(d);
    if (!(tol > 0.0 && tol <= 1e-4))
      throw DomainError("profile tolerance must lie in (0, 1e-4]");
    if (nodes <= 0) nodes = default_nodes;
    const auto xs = ChebSeries::nodes(nodes);
    std::vector<ProfileSample> samples(nodes);
    const double qtol = std::min(1e-3 * tol, 1e-12);
    auto work = [&](int begin, int stride) {
      for (int j = begin; j < nodes; j += stride)
        samples[j] = profile_sample(d, theta_of_x(xs[j]), qtol);
    };
    if (threads <= 0)
      threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, nodes);
    {
      std::vector<std::jthread> pool;
      std::vector<std::exception_ptr> errs(threads);
      for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
          try {
            work(t, threads);
          } catch (...) {
            errs[t] = std::current_exception();
          }
        });
      pool.clear();
      for (auto& ep : errs)
        if (ep) std::rethrow_exception(ep);
    }
    std::vector<double> h(nodes), dh(nodes), ddh(nodes), g(nodes);
    for (int j = 0; j < nodes; ++j) {
      h[j] = samples[j].h;
      dh[j] = samples[j].dh;
      ddh[j] = samples[j].ddh;
      g[j] = h[j] * dtheta_dx(xs[j]);
    }
    return from_coeffs(d, tol, ChebSeries::interpolate(h).coeffs(),
                       ChebSeries::interpolate(dh).coeffs(),
                       ChebSeries::interpolate(ddh).coeffs(),
                       ChebSeries::interpolate(g).integral().coeffs());
  }

  static AngularProfile from_coeffs(int d, double tol, std::vector<double> h,
                                    std::vector<double> dh, std::vector<double> ddh,
                                    std::vector<double> cum) {
    AngularProfile p;
    p.d_ = d;
    p.tol_ = tol;
    p.h_ = ChebSeries(std::move(h));
    p.dh_ = ChebSeries(std::move(dh));
    p.ddh_ = ChebSeries(std::move(ddh));
    p.cum_ = ChebSeries(std::move(cum));
    return p;
  }

  int dimension() const { return d_; }
  double tol() const { return tol_; }

  double h(double theta) const { return h_(x_of_theta(theta)); }
  double dh(double theta) const { return dh_(x_of_theta(theta)); }
  double ddh(double theta) const { return ddh_(x_of_theta(theta)); }
  /// int_0^theta h_d.
  double integral(double theta) const { return cum_(x_of_theta(theta)); }
  /// d^2 h_d + h_d'', the angular factor of the density.
  double angular_density(double theta) const {
    return d_ * d_ * h(theta) + ddh(theta);
  }

  const ChebSeries& h_series() const { return h_; }
  const ChebSeries& dh_series() const { return dh_; }
  const ChebSeries& ddh_series() const { return ddh_; }
  const ChebSeries& integral_series() const { return cum_; }

  static constexpr int default_nodes = 160;

 private:
  int d_ = 0;
  double tol_ = 0.0;
  ChebSeries h_, dh_, ddh_, cum_;
};

}  // namespace mzres

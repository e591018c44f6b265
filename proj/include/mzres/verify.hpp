#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mzres/geometry.hpp"
#include "mzres/mzdist.hpp"
#include "mzres/profile.hpp"

namespace mzres {

struct CheckResult {
  std::string name;
  double value;      ///< observed discrepancy
  double threshold;  ///< pass iff value <= threshold
  bool pass() const { return value <= threshold; }
};

/// Identity suite for one dimension: the checks behind `mzres verify`.
inline std::vector<CheckResult> identity_suite(const MZDistribution& m) {
  const int d = m.dimension();
  const auto& p = m.profile();
  std::vector<CheckResult> out;

  {
    double worst = 0.0;
    for (int k = 0; k <= 400; ++k) {
      const double t = 0.5 * M_PI * k / 400.0;
      worst = std::max(worst, std::abs(p.h(0.5 * M_PI + t) - p.h(0.5 * M_PI - t)));
    }
    out.push_back({"symmetry h(pi/2+t) = h(pi/2-t)", worst, 1e-8});
  }
  {
    // Richardson on the quotient h(t)/t, whose error behaves like t^{3/2}.
    auto q = [d](double t) { return profile_sample(d, t).h / t; };
    auto rich = [&](double t) {
      const double k = std::pow(2.0, 1.5);
      return (k * q(0.5 * t) - q(t)) / (k - 1.0);
    };
    const double r0 = rich(1e-3);
    out.push_back({"h'(0+) = e_d", std::abs(r0 - m.e_d()), 1e-4});
    auto qpi = [d](double t) { return -profile_sample(d, M_PI - t).h / t; };
    const double k = std::pow(2.0, 1.5);
    const double rpi = (k * qpi(0.5e-3) - qpi(1e-3)) / (k - 1.0);
    out.push_back({"h'(pi-) = -e_d", std::abs(rpi + m.e_d()), 1e-4});
  }
  {
    const double planar = c_const_planar(d);
    out.push_back({"dual c_d (1-D vs 2-D)", std::abs(m.c_d() - planar) / planar, 1e-5});
  }
  {
    const double lemma = m.sector_mass(Sector(0.0, M_PI)) + 2.0 * m.mu0_radius_mass();
    out.push_back({"mu(D) = 1 (sector formula)", std::abs(lemma - 1.0), 1e-5});
    const double area = m.window_mass(Window::disc(0.0, 1.0), Variant::Closed);
    out.push_back({"mu(D) = 1 (window quadrature)", std::abs(area - 1.0), 1e-3});
  }
  {
    const Window w = Window::disc({0.1, -0.4}, 0.3);
    const double s = 1.7;
    const double ratio = m.window_mass(w.scaled(s)) / (std::pow(s, d) * m.window_mass(w));
    out.push_back({"homogeneity mu(sW) = s^d mu(W)", std::abs(ratio - 1.0), 1e-6});
  }
  {
    double worst = 0.0, peak = 0.0;
    for (int k = 1; k < 400; ++k) {
      const double a = p.angular_density(M_PI * k / 400.0);
      peak = std::max(peak, a);
      worst = std::min(worst, a);
    }
    out.push_back({"angular density >= 0", std::max(0.0, -worst) / peak, 1e-6});
  }
  {
    // Least-squares slope of log kappa(e^{-i theta}) against log theta.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 2; k <= 5; ++k) {
      const double th = std::pow(10.0, -k);
      const double x = std::log(th), y = std::log(m.kappa(std::polar(1.0, -th)));
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    out.push_back({"kappa near-axis exponent 1/2", std::abs(slope - 0.5), 0.1});
  }
  {
    double worst = 0.0;
    const double hstep = 1e-3;
    for (cplx z : {cplx(0.3, -0.4), cplx(-0.5, -0.2), cplx(0.05, -0.7), cplx(0.6, -0.6)}) {
      auto H = [&](cplx w) { return m.potential_H(w); };
      const double lap = (H(z + hstep) + H(z - hstep) + H(z + cplx(0, hstep)) +
                          H(z - cplx(0, hstep)) - 4.0 * H(z)) /
                         (hstep * hstep);
      worst = std::max(worst, std::abs(lap / (2.0 * M_PI * m.kappa(z)) - 1.0));
    }
    out.push_back({"Laplacian H = 2 pi kappa", worst, 1e-2});
  }
  {
    double worst = 0.0;
    for (double x : {0.3, 0.7, -0.5}) {
      auto slope = [&](double h) { return (m.potential_H(cplx(x, -h)) - m.potential_H(x)) / h; };
      const double est = 2.0 * slope(1e-5) - slope(2e-5);
      const double exact = m.e_d() * std::pow(std::abs(x), d - 1) / m.c_d();
      worst = std::max(worst, std::abs(est / exact - 1.0));
    }
    out.push_back({"dH/dy on R = e_d |x|^{d-1} / c_d", worst, 1e-3});
  }
  return out;
}

}  // namespace mzres

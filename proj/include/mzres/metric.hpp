#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mzres/counting.hpp"
#include "mzres/error.hpp"
#include "mzres/geometry.hpp"
#include "mzres/mzdist.hpp"
#include "mzres/network_simplex.hpp"

namespace mzres {

enum class Provenance { Empirical, MzGrid };

struct Atom {
  cplx point;
  double mass;
};

/// Finite atomic measure on a window.
struct DiscreteMeasure {
  std::vector<Atom> atoms;
  Window window;
  Provenance provenance = Provenance::Empirical;

  double total_mass() const {
    double m = 0.0;
    for (const auto& a : atoms) m += a.mass;
    return m;
  }
};

/// Atoms of an empirical measure that lie in the closure of the window.
inline DiscreteMeasure restrict_to(const EmpiricalMeasure& em, const Window& w) {
  DiscreteMeasure m{{}, w, Provenance::Empirical};
  for (const auto& a : em.atoms)
    if (w.contains(a.point, true)) m.atoms.push_back({a.point, a.mass});
  return m;
}

/// Cell discretization of mu_MZ restricted to the window.
///
/// The bounding box is covered by square cells of side <= mesh. Each cell
/// carries one atom of mass equal to the midpoint-rule kappa integral over
/// its part of the window, placed at the kappa-weighted centroid. Cells are
/// sampled on a 2 x 2 sub-grid, cells within one mesh of the real axis on
/// a 6 x 6 sub-grid. The mu0 part becomes segment atoms with exact masses.
inline DiscreteMeasure discretize_mz(const MZDistribution& dist, const Window& w, double mesh) {
  if (!(mesh > 0.0) || !std::isfinite(mesh)) throw GeometryError("mesh must be positive");
  const auto bb = w.bounding_box();
  const double wx = bb[1] - bb[0], wy = bb[3] - bb[2];
  if (!(wx > 0.0) || !(wy > 0.0)) throw GeometryError("degenerate window");
  DiscreteMeasure m{{}, w, Provenance::MzGrid};

  const double ytop = std::min(bb[3], 0.0);
  if (ytop > bb[2]) {
    const int nx = static_cast<int>(std::ceil(wx / mesh));
    const int ny = static_cast<int>(std::ceil((ytop - bb[2]) / mesh));
    const double hx = wx / nx, hy = (ytop - bb[2]) / ny;
    for (int j = 0; j < ny; ++j) {
      const double y0 = bb[2] + j * hy;
      const bool near_axis = ytop == 0.0 && j >= ny - 2;
      const int s = near_axis ? 6 : 2;
      for (int i = 0; i < nx; ++i) {
        const double x0 = bb[0] + i * hx;
        double mass = 0.0, cx = 0.0, cy = 0.0;
        const double sub_area = hx * hy / (s * s);
        for (int a = 0; a < s; ++a)
          for (int b = 0; b < s; ++b) {
            const cplx z(x0 + (a + 0.5) * hx / s, y0 + (b + 0.5) * hy / s);
            if (z.imag() >= 0.0 || !w.contains(z, true, 0.0)) continue;
            const double q = dist.kappa(z) * sub_area;
            mass += q;
            cx += q * z.real();
            cy += q * z.imag();
          }
        if (mass <= 0.0) continue;
        cplx c(cx / mass, cy / mass);
        if (!w.contains(c, true)) c = {x0 + 0.5 * hx, y0 + 0.5 * hy};
        if (!w.contains(c, true)) continue;
        m.atoms.push_back({c, mass});
      }
    }
  }

  for (const auto& iv : w.real_intervals(false)) {
    const int n = std::max(1, static_cast<int>(std::ceil((iv.hi - iv.lo) / mesh)));
    const double h = (iv.hi - iv.lo) / n;
    for (int i = 0; i < n; ++i) {
      const double a = iv.lo + i * h, b = i + 1 == n ? iv.hi : a + h;
      const double mass = dist.mu0_mass(a, b);
      if (mass > 0.0) m.atoms.push_back({cplx(0.5 * (a + b), 0.0), mass});
    }
  }
  return m;
}

struct DistanceReport {
  double gamma = 1.0;
  Window omega;
  double value = 0.0;
  double mesh = 0.0;
  double solver_gap = 0.0;
  std::int64_t pivots = 0;
};

/// dist_{Omega,1}: the supremum of sum phi (mu1 - mu2) over 1-Lipschitz phi
/// with |phi| <= dist(., boundary of Omega). Solved in its dual form as a
/// transportation problem in which a boundary node B may absorb or emit
/// mass at cost dist(x, boundary):
///   sources = mu1 atoms + B (supply mu2 total),
///   sinks   = mu2 atoms + B (demand mu1 total), cost(B, B) = 0.
/// Masses are quantized to integer multiples of 2^-50 times the larger
/// total mass; the reported gap compares the primal cost with the dual
/// objective evaluated on the exact masses.
inline DistanceReport dist_lip(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                               const Window& w, double mesh = 0.0) {
  for (const auto* mu : {&mu1, &mu2})
    for (const auto& a : mu->atoms) {
      if (!(a.mass >= 0.0)) throw DomainError("negative mass in dist_lip");
      if (!w.contains(a.point, true, 1e-9)) throw DomainError("atom outside the window");
    }
  DistanceReport rep{1.0, w};
  rep.mesh = mesh;
  const std::size_t n1 = mu1.atoms.size(), n2 = mu2.atoms.size();
  const double M1 = mu1.total_mass(), M2 = mu2.total_mass();
  const double scale = std::max(M1, M2);
  if (scale == 0.0) return rep;
  const double unit = scale / std::ldexp(1.0, 50);

  std::vector<std::int64_t> supply(n1 + 1), demand(n2 + 1);
  std::int64_t Q1 = 0, Q2 = 0;
  for (std::size_t i = 0; i < n1; ++i) Q1 += supply[i] = std::llround(mu1.atoms[i].mass / unit);
  for (std::size_t j = 0; j < n2; ++j) Q2 += demand[j] = std::llround(mu2.atoms[j].mass / unit);
  supply[n1] = Q2;
  demand[n2] = Q1;

  std::vector<double> b1(n1), b2(n2);
  for (std::size_t i = 0; i < n1; ++i) b1[i] = std::max(0.0, w.signed_distance(mu1.atoms[i].point));
  for (std::size_t j = 0; j < n2; ++j) b2[j] = std::max(0.0, w.signed_distance(mu2.atoms[j].point));
  const int B1 = static_cast<int>(n1), B2 = static_cast<int>(n2);
  auto cost = [&](int i, int j) -> double {
    if (i == B1) return j == B2 ? 0.0 : b2[j];
    if (j == B2) return b1[i];
    return std::abs(mu1.atoms[i].point - mu2.atoms[j].point);
  };

  flow::TransportSimplex ns(std::move(supply), std::move(demand), cost);
  rep.pivots = ns.solve();
  rep.value = ns.primal_cost() * unit;

  // Dual objective with the exact masses; the B node potentials enter with
  // the balancing masses M2 (as a source) and M1 (as a sink).
  long double dual = 0.0;
  for (std::size_t i = 0; i < n1; ++i)
    dual += static_cast<long double>(ns.source_potential(static_cast<int>(i))) * mu1.atoms[i].mass;
  dual += static_cast<long double>(ns.source_potential(B1)) * M2;
  for (std::size_t j = 0; j < n2; ++j)
    dual -= static_cast<long double>(ns.sink_potential(static_cast<int>(j))) * mu2.atoms[j].mass;
  dual -= static_cast<long double>(ns.sink_potential(B2)) * M1;
  rep.solver_gap = std::abs(rep.value - static_cast<double>(dual)) +
                   ns.dual_violation() * (M1 + M2);
  return rep;
}

struct Bracket {
  double lower;
  double upper_shape;  ///< valid only up to an unspecified constant factor
};

/// Bracket for dist_{Omega,gamma}: the value at (Omega, 1) from below and
/// (value at (Omega', 1))^gamma from above, up to a constant.
inline Bracket dist_bracket(double d1, double d1p, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in (0, 1]");
  return {d1, std::pow(d1p, gamma)};
}

struct RateFit {
  double slope, intercept, residual;
};

/// Least-squares fit of log(distance) against log(r).
inline RateFit rate_fit(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw DomainError("rate_fit needs at least 3 points");
  const double n = static_cast<double>(pairs.size());
  double sx = 0, sy = 0;
  for (const auto& [r, v] : pairs) {
    if (!(r > 0.0) || !(v > 0.0)) throw DomainError("rate_fit needs positive r and distances");
    sx += std::log(r), sy += std::log(v);
  }
  const double mx = sx / n;
  double var = 0.0;
  for (const auto& p : pairs) var += (std::log(p.first) - mx) * (std::log(p.first) - mx);
  if (var <= 1e-24 * std::max(1.0, mx * mx)) throw DomainError("degenerate design in rate_fit");
  double cov = 0.0;
  const double my = sy / n;
  for (const auto& [r, v] : pairs) cov += (std::log(r) - mx) * (std::log(v) - my);
  const double slope = cov / var, intercept = my - slope * mx;
  double rss = 0.0;
  for (const auto& [r, v] : pairs) {
    const double e = std::log(v) - (intercept + slope * std::log(r));
    rss += e * e;
  }
  return {slope, intercept, std::sqrt(rss / n)};
}

}  // namespace mzres

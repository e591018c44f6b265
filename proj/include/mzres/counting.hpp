#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mzres/error.hpp"
#include "mzres/geometry.hpp"
#include "mzres/mzdist.hpp"
#include "mzres/resonator.hpp"

namespace mzres {

/// Entries below this modulus count as resonances at the origin.
inline constexpr double zero_modulus = 1e-10;

namespace detail {

inline void require_radius(const ResonanceSet& rs, double r) {
  if (!(r >= 0.0)) throw RangeError("radius must be nonnegative");
  if (r > rs.search_radius * (1.0 + 1e-12))
    throw RangeError("radius " + std::to_string(r) + " exceeds search radius " +
                     std::to_string(rs.search_radius));
}

template <class F>
void for_each_resonance(const ResonanceSet& rs, F&& f) {
  for (const auto& e : rs.entries) f(e);
  for (const auto& e : rs.exceptional) f(e);
}

}  // namespace detail

/// n_V(r): resonances of modulus <= r, with multiplicity.
inline std::uint64_t n_count(const ResonanceSet& rs, double r) {
  detail::require_radius(rs, r);
  std::uint64_t n = 0;
  detail::for_each_resonance(rs, [&](const ResonanceEntry& e) {
    if (std::abs(e.lambda) <= r) n += e.mult;
  });
  return n;
}

/// N_V(r) = sum over 0 < |lambda| <= r of mult log(r / |lambda|).
inline double big_N(const ResonanceSet& rs, double r) {
  detail::require_radius(rs, r);
  double s = 0.0;
  detail::for_each_resonance(rs, [&](const ResonanceEntry& e) {
    const double m = std::abs(e.lambda);
    if (m >= zero_modulus && m <= r) s += static_cast<double>(e.mult) * std::log(r / m);
  });
  return s;
}

/// n_{V,W}(r): resonances in r W for the chosen variant of W.
inline std::uint64_t window_count(const ResonanceSet& rs, const Window& w, double r,
                                  Variant v = Variant::LowerOpen) {
  if (!(r > 0.0)) throw RangeError("window radius must be positive");
  detail::require_radius(rs, r * w.circumradius());
  std::uint64_t n = 0;
  detail::for_each_resonance(rs, [&](const ResonanceEntry& e) {
    if (w.contains(e.lambda / r, v)) n += e.mult;
  });
  return n;
}

struct EmpiricalAtom {
  cplx point;
  double mass;
};

/// Scaled empirical measure: atoms lambda / r of mass mult / (c_d a^d r^d).
struct EmpiricalMeasure {
  std::vector<EmpiricalAtom> atoms;
  double c_d = 0.0, a = 0.0, r = 0.0;
  int d = 3;

  double normalization() const { return c_d * std::pow(a, d) * std::pow(r, d); }

  double mass(const Window& w, Variant v = Variant::LowerOpen) const {
    double m = 0.0;
    for (const auto& at : atoms)
      if (w.contains(at.point, v)) m += at.mass;
    return m;
  }
  double total_mass() const {
    double m = 0.0;
    for (const auto& at : atoms) m += at.mass;
    return m;
  }
};

inline EmpiricalMeasure empirical_measure(const ResonanceSet& rs, double r,
                                          const MZDistribution& dist) {
  if (!(r > 0.0)) throw RangeError("radius must be positive");
  const int d = rs.potential.dimension();
  if (d != dist.dimension())
    throw DomainError("dimension mismatch between resonance set and distribution");
  EmpiricalMeasure m;
  m.c_d = dist.c_d();
  m.a = rs.potential.support_radius();
  m.r = r;
  m.d = d;
  const double norm = m.normalization();
  detail::for_each_resonance(rs, [&](const ResonanceEntry& e) {
    m.atoms.push_back({e.lambda / r, static_cast<double>(e.mult) / norm});
  });
  return m;
}

struct NamedWindow {
  std::string id;
  Window window;
};

struct ReportRow {
  double r;
  std::string window_id;
  Variant variant;
  double empirical_mass;
  double mz_mass;
  double gap;
};

/// Window-by-window comparison of the scaled empirical measure with mu_MZ.
/// Rows are ordered by r, then window, then variant. A window contributes a
/// single LowerOpen row unless its four variant counts differ.
inline std::vector<ReportRow> weak_convergence_report(const ResonanceSet& rs,
                                                      const MZDistribution& dist,
                                                      const std::vector<double>& radii,
                                                      const std::vector<NamedWindow>& windows) {
  static constexpr Variant all[] = {Variant::LowerOpen, Variant::LowerClosed, Variant::Open,
                                    Variant::Closed};
  auto length = [](const std::vector<Interval>& iv) {
    double s = 0.0;
    for (const auto& i : iv) s += i.hi - i.lo;
    return s;
  };
  for (const auto& nw : windows)
    if (length(nw.window.real_intervals(true)) - length(nw.window.real_intervals(false)) > 1e-12)
      throw GeometryError("window " + nw.id + " has boundary of positive length on the real axis");
  std::vector<std::vector<double>> mz(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i)
    for (Variant v : all) mz[i].push_back(dist.window_mass(windows[i].window, v));

  std::vector<ReportRow> rows;
  for (double r : radii) {
    const EmpiricalMeasure em = empirical_measure(rs, r, dist);
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const Window& w = windows[i].window;
      detail::require_radius(rs, r * w.circumradius());
      double masses[4];
      for (int k = 0; k < 4; ++k) masses[k] = em.mass(w, all[k]);
      const bool differ = masses[0] != masses[1] || masses[0] != masses[2] ||
                          masses[0] != masses[3];
      for (int k = 0; k < (differ ? 4 : 1); ++k)
        rows.push_back({r, windows[i].id, all[k], masses[k], mz[i][k],
                        std::abs(masses[k] - mz[i][k])});
    }
  }
  return rows;
}

}  // namespace mzres

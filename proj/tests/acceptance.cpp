// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mzres/counting.hpp"
#include "mzres/io_store.hpp"
#include "mzres/metric.hpp"
#include "mzres/mzdist.hpp"
#include "mzres/oracle.hpp"
#include "mzres/resonator.hpp"
#include "mzres/verify.hpp"

using namespace mzres;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt <= budget_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("[%s] %2d %s: %s (%.1f s%s)\n", ok ? "PASS" : "FAIL", id, title, o.detail.c_str(),
              dt, in_time ? "" : ", over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const CheckResult& find(const std::vector<CheckResult>& v, const std::string& prefix) {
  for (const auto& c : v)
    if (c.name.rfind(prefix, 0) == 0) return c;
  throw std::runtime_error("missing check " + prefix);
}

}  // namespace

int main() {
  std::unique_ptr<MZDistribution> m3, m5;
  std::vector<CheckResult> id3, id5;

  report(1, "closed-form e_3, e_5", 1.0, [] {
    const double g3 = std::abs(e_const(3) / (4.0 / 3.0) - 1.0);
    const double g5 = std::abs(e_const(5) / (4.0 / 45.0) - 1.0);
    return Outcome{g3 <= 1e-12 && g5 <= 1e-12, fmt("rel err %.1e, %.1e", g3, g5)};
  });

  report(2, "h_3'(0+) = e_3 and h_3'(pi-) = -e_3", 30.0, [&] {
    m3 = std::make_unique<MZDistribution>(MZDistribution::build(3));
    id3 = identity_suite(*m3);
    const auto& a = find(id3, "h'(0+)");
    const auto& b = find(id3, "h'(pi-)");
    return Outcome{a.pass() && b.pass(), fmt("deviations %.2e, %.2e (limit 1e-4)", a.value, b.value)};
  });

  report(3, "dual c_d formulas, d = 3 and 5", 120.0, [&] {
    m5 = std::make_unique<MZDistribution>(MZDistribution::build(5));
    id5 = identity_suite(*m5);
    const auto& a = find(id3, "dual c_d");
    const auto& b = find(id5, "dual c_d");
    return Outcome{a.pass() && b.pass(),
                   fmt("c_3 = %.10f, c_5 = %.10f, rel gaps %.1e, %.1e", m3->c_d(), m5->c_d(),
                       a.value, b.value)};
  });

  report(4, "mu_MZ(D) = 1", 60.0, [&] {
    const auto& a = find(id3, "mu(D) = 1 (sector");
    const auto& b = find(id3, "mu(D) = 1 (window");
    return Outcome{a.pass() && b.pass(),
                   fmt("sector formula %.1e (1e-5), window quadrature %.1e (1e-3)", a.value, b.value)};
  });

  report(5, "symmetry, positivity, kappa exponent", 60.0, [&] {
    const auto& s = find(id3, "symmetry");
    const auto& p = find(id3, "angular density");
    const auto& k = find(id3, "kappa near-axis");
    return Outcome{s.pass() && p.pass() && k.pass(),
                   fmt("symmetry %.1e, negativity %.1e, |exponent - 0.5| = %.3f", s.value,
                       p.value, k.value)};
  });

  report(6, "Laplacian H = 2 pi kappa, dH/dy on R", 60.0, [&] {
    const auto& l = find(id3, "Laplacian");
    const auto& g = find(id3, "dH/dy");
    return Outcome{l.pass() && g.pass(), fmt("rel errors %.1e (1e-2), %.1e (1e-3)", l.value, g.value)};
  });

  report(7, "s-wave oracle and order sums", 60.0, [] {
    const auto V = RadialPotential::square_well(3, 1.0, -9.0);
    const Box box{-8.0, 8.0, -4.0, -1e-6};
    const auto ours = channel_zeros(V, 0, box);
    const auto ref = swave_oracle(1.0, -9.0, box);
    std::vector<bool> used(ref.size(), false);
    double worst = 0.0;
    bool one_to_one = ours.size() == ref.size();
    for (const auto& z : ours) {
      std::size_t best = ref.size();
      for (std::size_t i = 0; i < ref.size(); ++i)
        if (!used[i] && (best == ref.size() || std::abs(ref[i] - z.zero) < std::abs(ref[best] - z.zero)))
          best = i;
      if (best == ref.size()) {
        one_to_one = false;
        break;
      }
      used[best] = true;
      worst = std::max(worst, std::abs(ref[best] - z.zero));
    }
    auto s = ChannelSearch::for_channel(V, 0);
    int orders = 0;
    for (const auto& z : ours) orders += z.order;
    const int wind = s.winding(box);
    bool sums = orders == wind;
    for (int l : {1, 3}) {
      auto sl = ChannelSearch::for_channel(V, l);
      const Box b{-8.013, 8.007, -4.0, -1e-3};
      int o = 0;
      for (const auto& z : sl.zeros(b)) o += z.order;
      sums = sums && o == sl.winding(b);
    }
    return Outcome{one_to_one && worst <= 1e-8 && sums,
                   fmt("%zu zeros vs %zu oracle, max deviation %.1e, winding %d", ours.size(),
                       ref.size(), worst, wind)};
  });

  // Shared acceptance resonance set: d = 3, a = 1, v = 6, R = 60.
  const double R = 60.0;
  ResonanceSet rs;
  double weyl_time = 0.0;
  report(8, "Weyl ratio n(R) / (c_3 R^3)", 600.0, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    rs = resonances(RadialPotential::square_well(3, 1.0, 6.0), R);
    weyl_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double c3 = m3->c_d();
    std::vector<double> ratio;
    for (double r : {20.0, 40.0, 60.0}) ratio.push_back(n_count(rs, r) / (c3 * r * r * r));
    const bool in_band = ratio[2] >= 0.85 && ratio[2] <= 1.15;
    const bool monotone = std::abs(1 - ratio[0]) > std::abs(1 - ratio[1]) &&
                          std::abs(1 - ratio[1]) > std::abs(1 - ratio[2]);
    return Outcome{in_band && monotone && rs.cutoff_margin_ok(),
                   fmt("ratios %.4f, %.4f, %.4f; highest channel %d vs l_max %d", ratio[0],
                       ratio[1], ratio[2], rs.highest_nonempty_l, rs.l_hint)};
  });

  report(9, "sector law on four sectors", 600.0 - weyl_time, [&] {
    const double c3 = m3->c_d();
    const double q = M_PI / 4;
    int improved = 0;
    double worst = 0.0;
    std::string detail;
    for (int k = 0; k < 4; ++k) {
      const Sector s(k * q, (k + 1) * q);
      const Window w = Window::sector(s);
      const double target = m3->corollary_coefficient(s);
      auto gap = [&](double r) {
        return std::abs(window_count(rs, w, r) / (c3 * r * r * r) - target);
      };
      const double g20 = gap(20.0), g60 = gap(60.0);
      worst = std::max(worst, g60);
      improved += g60 < g20;
      detail += fmt("%s%.3f->%.3f", k ? ", " : "gaps ", g20, g60);
    }
    return Outcome{worst <= 0.15 && improved >= 3,
                   detail + fmt("; max at R=60 %.3f, improved %d/4", worst, improved)};
  });

  report(10, "dist_lip decay on disc(-0.5i, 0.45)", 600.0, [&] {
    const Window w = Window::disc({0.0, -0.5}, 0.45);
    const double mesh = 0.02;
    const auto grid = discretize_mz(*m3, w, mesh);
    std::vector<std::pair<double, double>> pts;
    std::string detail = "dist";
    double gap = 0.0;
    for (double r : {15.0, 30.0, 60.0}) {
      const auto rep = dist_lip(restrict_to(empirical_measure(rs, r, *m3), w), grid, w, mesh);
      pts.emplace_back(r, rep.value);
      gap = std::max(gap, rep.solver_gap);
      detail += fmt(" %.5f", rep.value);
    }
    const bool decreasing = pts[0].second > pts[1].second && pts[1].second > pts[2].second;
    const auto fit = rate_fit(pts);
    return Outcome{decreasing && fit.slope < 0.0,
                   detail + fmt("; slope %.3f, solver gap %.1e", fit.slope, gap)};
  });

  report(11, "property suites", 300.0, [&] {
    // Branch grid: rho continuous across a 200 x 200 grid of the upper half-plane.
    double branch = 0.0;
    const int n = 200;
    for (int i = 0; i < n; ++i)
      for (int j = 1; j < n; ++j) {
        const cplx z(-3.0 + 6.0 * i / n, 3.0 * j / n);
        const cplx dz(6.0 / n, 0.0);
        const double jump = std::abs(rho(UpperPoint(z + dz)) - rho(UpperPoint(z)));
        const double bound = 2.0 * std::abs(dz) *
                             (std::abs(rho_prime(UpperPoint(z))) + std::abs(rho_prime(UpperPoint(z + dz))));
        branch = std::max(branch, jump / (bound + 1e-12));
      }
    // Sampler: sector(0.4, 1.1) frequency within 3 sigma.
    const Sector sec(0.4, 1.1);
    const Window sw = Window::sector(sec);
    const double p = m3->sector_mass(sec);
    const std::size_t ns = 100000;
    std::size_t hits = 0;
    for (const auto& z : m3->sample(ns, 2024)) hits += sw.contains(z, Variant::LowerOpen, 0.0);
    const double zscore = std::abs(double(hits) / ns - p) / std::sqrt(p * (1 - p) / ns);
    // Metric: triangle inequality on random triples.
    std::mt19937_64 rng(77);
    const Window w = Window::disc({0.0, -0.5}, 0.45);
    std::uniform_real_distribution<double> u(-0.3, 0.3), mass(0.001, 0.1);
    auto random_measure = [&] {
      DiscreteMeasure d{{}, w};
      for (int k = 0; k < 12; ++k) d.atoms.push_back({cplx(u(rng), -0.5 + u(rng)), mass(rng)});
      return d;
    };
    double tri = -INFINITY;
    for (int t = 0; t < 50; ++t) {
      const auto a = random_measure(), b = random_measure(), c = random_measure();
      tri = std::max(tri, dist_lip(a, c, w).value -
                              dist_lip(a, b, w).value - dist_lip(b, c, w).value);
    }
    // io: byte-identical reruns of the resonance table.
    const auto small1 = resonances(RadialPotential::square_well(3, 1.0, 6.0), 8.0);
    const auto small2 = resonances(RadialPotential::square_well(3, 1.0, 6.0), 8.0);
    const bool same = io::resonance_table(small1).to_csv() == io::resonance_table(small2).to_csv();
    return Outcome{branch < 1.0 && zscore <= 3.0 && tri <= 1e-12 && same,
                   fmt("branch ratio %.3f, sampler z = %.2f, triangle excess %.1e, csv %s", branch,
                       zscore, tri, same ? "identical" : "differs")};
  });

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "mzres/counting.hpp"
#include "mzres/io_store.hpp"
#include "mzres/metric.hpp"
#include "mzres/mzdist.hpp"
#include "mzres/oracle.hpp"
#include "mzres/resonator.hpp"
#include "mzres/verify.hpp"

namespace {

using namespace mzres;
namespace fs = std::filesystem;

constexpr double profile_tol = 1e-9;

MZDistribution distribution(int d) {
  require_odd_dimension(d);
  return io::load_or_build_distribution(d, profile_tol, io::cache_dir());
}

// Table output goes to --out when given, stdout otherwise.
void emit(const io::Table& t, const std::string& out) {
  if (out.empty())
    std::cout << t.to_csv();
  else
    io::write_csv(t, out);
}

int cmd_verify(int d, double tol) {
  if (!(tol > 0.0 && tol <= 1e-4)) throw UsageError("--tol must lie in (0, 1e-4]");
  require_odd_dimension(d);
  const MZDistribution m(AngularProfile::build(d, tol), SigmaCurve::build(64));
  bool ok = true;
  std::printf("%-40s %12s %10s  %s\n", "check", "value", "threshold", "result");
  for (const auto& c : identity_suite(m)) {
    std::printf("%-40s %12.3e %10.1e  %s\n", c.name.c_str(), c.value, c.threshold,
                c.pass() ? "PASS" : "FAIL");
    ok = ok && c.pass();
  }
  return ok ? 0 : 1;
}

int cmd_hd_table(int d, int n, const std::string& out) {
  if (n < 2) throw UsageError("--n must be at least 2");
  const auto m = distribution(d);
  const auto& p = m.profile();
  io::Table t{{"theta", "h", "dh", "ddh", "angular_density"}, {}};
  for (int k = 0; k < n; ++k) {
    const double th = M_PI * k / (n - 1);
    t.rows.push_back({io::fmt(th), io::fmt(p.h(th)), io::fmt(p.dh(th)), io::fmt(p.ddh(th)),
                      io::fmt(p.angular_density(th))});
  }
  emit(t, out);
  return 0;
}

int cmd_sector_mass(int d, double t1, double t2, const std::string& convention) {
  const Sector s = [&] {
    try {
      return Sector(t1, t2);
    } catch (const GeometryError& e) {
      throw UsageError(e.what());
    }
  }();
  const auto m = distribution(d);
  const double lemma = m.sector_mass(s), cor = m.corollary_coefficient(s);
  if (convention == "lemma")
    std::printf("lemma %.17g\n", lemma);
  else if (convention == "corollary")
    std::printf("corollary %.17g\n", cor);
  else if (lemma == cor)
    std::printf("sector_mass %.17g\n", lemma);
  else
    std::printf("lemma %.17g\ncorollary %.17g\n", lemma, cor);
  return 0;
}

ResonanceSet compute(const io::ExperimentConfig& cfg, double R) {
  ResonanceOptions opt;
  opt.tol = cfg.tol;
  std::fprintf(stderr, "computing resonances up to |k| = %g\n", R);
  return resonances(cfg.potential(), R, opt);
}

int run_oracle(const io::ExperimentConfig& cfg, double R) {
  if (cfg.d != 3 || cfg.shells.size() != 1)
    throw UsageError("--oracle needs d = 3 and a single shell");
  const double a = cfg.a;
  const double X = std::min(R, 20.0), Y = std::min(R, 8.0);
  const Box box{-X * 1.0013, X * 1.0007, -Y, -1e-3};
  const auto ours = channel_zeros(cfg.potential(), 0, box, cfg.tol);
  const auto ref = swave_oracle(a, cfg.shells[0].value, box);
  double worst = 0.0;
  std::size_t matched = 0;
  for (const auto& z : ours) {
    double best = INFINITY;
    for (const auto& r : ref) best = std::min(best, std::abs(r - z.zero));
    if (best < 1e-6) ++matched;
    worst = std::max(worst, best);
  }
  std::printf("oracle: %zu channel zeros, %zu oracle zeros, max deviation %.3e\n", ours.size(),
              ref.size(), worst);
  return ours.size() == ref.size() && matched == ours.size() && worst <= 1e-8 ? 0 : 1;
}

int cmd_resonances(const std::string& config, bool oracle, const std::string& out) {
  auto cfg = io::load_config(config);
  if (!out.empty()) cfg.out_dir = out;
  const double R = *std::max_element(cfg.radii.begin(), cfg.radii.end());
  const auto rs = compute(cfg, R);
  const fs::path dir = cfg.out_dir;
  io::write_csv(io::resonance_table(rs), dir / "resonances.csv");
  io::Table ch{{"l", "zeros", "complete"}, {}};
  for (const auto& c : rs.channels)
    ch.rows.push_back({std::to_string(c.l), std::to_string(c.zeros), c.complete ? "1" : "0"});
  io::write_csv(ch, dir / "channels.csv");
  io::Table ex{{"re_lambda", "im_lambda", "l", "channel_order", "harmonic_mult", "total_mult",
                "residual"},
               {}};
  for (const auto& e : rs.exceptional)
    ex.rows.push_back({io::fmt(e.lambda.real()), io::fmt(e.lambda.imag()), std::to_string(e.l),
                       std::to_string(e.channel_order), std::to_string(e.harmonic_mult),
                       std::to_string(e.mult), io::fmt(e.residual)});
  io::write_csv(ex, dir / "exceptional.csv");
  std::printf("R = %g: %zu entries, n = %llu, highest channel %d, l_max hint %d\n", R,
              rs.entries.size(), static_cast<unsigned long long>(rs.total_multiplicity()),
              rs.highest_nonempty_l, rs.l_hint);
  return oracle ? run_oracle(cfg, R) : 0;
}

int cmd_converge(const std::string& config, const std::string& out) {
  auto cfg = io::load_config(config);
  if (!out.empty()) cfg.out_dir = out;
  const auto m = distribution(cfg.d);
  std::vector<NamedWindow> windows;
  double reach = 1.0;
  for (const auto& w : cfg.windows) {
    windows.push_back({w.id, w.build()});
    reach = std::max(reach, windows.back().window.circumradius());
  }
  const double rmax = *std::max_element(cfg.radii.begin(), cfg.radii.end());
  const auto rs = compute(cfg, rmax * reach);
  const fs::path dir = cfg.out_dir;
  const double a = cfg.a;

  io::Table counts{{"r", "n", "N", "weyl_ratio", "log_weyl_ratio"}, {}};
  for (double r : cfg.radii) {
    const double norm = m.c_d() * std::pow(a * r, cfg.d);
    const auto n = n_count(rs, r);
    const double N = big_N(rs, r);
    counts.rows.push_back({io::fmt(r), std::to_string(n), io::fmt(N), io::fmt(n / norm),
                           io::fmt(cfg.d * N / norm)});
  }
  io::write_csv(counts, dir / "counts.csv");

  io::Table report{{"r", "window_id", "variant", "empirical_mass", "mz_mass", "gap"}, {}};
  for (const auto& row : weak_convergence_report(rs, m, cfg.radii, windows))
    report.rows.push_back({io::fmt(row.r), row.window_id, variant_name(row.variant),
                           io::fmt(row.empirical_mass), io::fmt(row.mz_mass), io::fmt(row.gap)});
  io::write_csv(report, dir / "report.csv");

  // Every (window, r) distance at mesh h and h/2; the pairs are independent
  // and solved on a small worker pool, results stored by job index.
  struct Job {
    std::size_t window;
    double r;
    double mesh;
    DistanceReport rep{1.0, Window::disc(0.0, 1.0)};
  };
  std::vector<DiscreteMeasure> grids, fine;
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    grids.push_back(discretize_mz(m, windows[i].window, cfg.mesh));
    fine.push_back(discretize_mz(m, windows[i].window, 0.5 * cfg.mesh));
    for (double h : {cfg.mesh, 0.5 * cfg.mesh})
      for (double r : cfg.radii) jobs.push_back({i, r, h});
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < std::min(hw, 4u); ++t)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next++) < jobs.size();) {
          auto& j = jobs[k];
          const auto& nw = windows[j.window];
          try {
            const auto emp = restrict_to(empirical_measure(rs, j.r, m), nw.window);
            const auto& grid = j.mesh == cfg.mesh ? grids[j.window] : fine[j.window];
            j.rep = dist_lip(emp, grid, nw.window, j.mesh);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);

  io::Table dist{{"r", "omega_id", "gamma", "value", "solver_gap", "mesh"}, {}};
  nlohmann::ordered_json fits = nlohmann::ordered_json::object();
  for (const auto& j : jobs)
    dist.rows.push_back({io::fmt(j.r), windows[j.window].id, "1", io::fmt(j.rep.value),
                         io::fmt(j.rep.solver_gap), io::fmt(j.mesh)});
  const std::size_t nr = cfg.radii.size();
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& id = windows[i].id;
    std::vector<std::pair<double, double>> pts;
    double C = 0.0;
    for (std::size_t k = 0; k < nr; ++k) {
      const auto& coarse = jobs[i * 2 * nr + k];
      const auto& half = jobs[i * 2 * nr + nr + k];
      pts.emplace_back(coarse.r, coarse.rep.value);
      C = std::max(C, std::abs(coarse.rep.value - half.rep.value) / cfg.mesh);
    }
    nlohmann::ordered_json entry;
    if (pts.size() >= 3) {
      try {
        const auto f = rate_fit(pts);
        entry = {{"slope", io::fmt(f.slope)},
                 {"intercept", io::fmt(f.intercept)},
                 {"residual", io::fmt(f.residual)}};
        std::printf("rate_fit %s: slope %.6g, residual %.3g\n", id.c_str(), f.slope, f.residual);
      } catch (const DomainError& e) {
        entry = {{"error", e.what()}};
      }
    }
    entry["discretization_C"] = io::fmt(C);
    std::printf("%s: |dist(h) - dist(h/2)| <= C h with C = %.4g\n", id.c_str(), C);
    fits[id] = entry;
  }
  io::write_csv(dist, dir / "distance.csv");
  io::write_json(fits, dir / "rate_fit.json");
  io::write_csv(io::resonance_table(rs), dir / "resonances.csv");
  return 0;
}

int cmd_sample(int d, long long n, std::uint64_t seed, const std::string& out) {
  if (n <= 0) throw UsageError("--n must be positive");
  const auto m = distribution(d);
  io::Table t{{"re", "im"}, {}};
  for (const auto& z : m.sample(static_cast<std::size_t>(n), seed))
    t.rows.push_back({io::fmt(z.real()), io::fmt(z.imag())});
  emit(t, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Melrose-Zworski distribution and resonance counting toolkit"};
  app.require_subcommand(1);

  int d = 3;
  double tol = 1e-9, t1 = 0, t2 = 0;
  int n = 181;
  long long ns = 1000;
  std::uint64_t seed = 1;
  std::string out, config, convention = "both";
  bool oracle = false;

  auto* verify = app.add_subcommand("verify", "run the identity suite for one dimension");
  verify->add_option("--d", d, "odd dimension >= 3")->required();
  verify->add_option("--tol", tol, "profile tolerance");

  auto* hd = app.add_subcommand("hd-table", "tabulate h_d and its derivatives");
  hd->add_option("--d", d)->required();
  hd->add_option("--n", n, "number of angles");
  hd->add_option("--out", out, "output CSV (default stdout)");

  auto* sm = app.add_subcommand("sector-mass", "mass of a sector of the unit disc");
  sm->add_option("--d", d)->required();
  sm->add_option("--theta1", t1)->required();
  sm->add_option("--theta2", t2)->required();
  sm->add_option("--convention", convention)->check(CLI::IsMember({"lemma", "corollary", "both"}));

  auto* res = app.add_subcommand("resonances", "compute resonances of a step potential");
  res->add_option("--config", config)->required();
  res->add_flag("--oracle", oracle, "cross-check channel 0 against the s-wave oracle");
  res->add_option("--out", out, "output directory (overrides the config)");

  auto* conv = app.add_subcommand("converge", "weak convergence and distance report");
  conv->add_option("--config", config)->required();
  conv->add_option("--out", out, "output directory (overrides the config)");

  auto* samp = app.add_subcommand("sample", "draw samples from the distribution");
  samp->add_option("--d", d)->required();
  samp->add_option("--n", ns)->required();
  samp->add_option("--seed", seed);
  samp->add_option("--out", out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*verify) return cmd_verify(d, tol);
    if (*hd) return cmd_hd_table(d, n, out);
    if (*sm) return cmd_sector_mass(d, t1, t2, convention);
    if (*res) return cmd_resonances(config, oracle, out);
    if (*conv) return cmd_converge(config, out);
    if (*samp) return cmd_sample(d, ns, seed, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidDimension& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

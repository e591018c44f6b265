#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mzres/bessel.hpp"
#include "mzres/oracle.hpp"
#include "mzres/resonator.hpp"
#include "oracles.hpp"

using namespace mzres;
using namespace mzres::bessel;

namespace {

std::vector<cplx> zeros_of(const std::vector<ChannelZero>& z) {
  std::vector<cplx> out;
  for (const auto& c : z)
    for (int k = 0; k < c.order; ++k) out.push_back(c.zero);
  return out;
}

// Greedy one-to-one matching; returns the worst distance or inf on a size mismatch.
double match(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (const auto& z : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx p, cplx q) {
      return std::abs(p - z) < std::abs(q - z);
    });
    worst = std::max(worst, std::abs(*it - z));
    b.erase(it);
  }
  return worst;
}

}  // namespace

TEST(Bessel, LowOrdersMatchClosedForms) {
  for (cplx x : {cplx(0.7, 0.0), cplx(3.0, -2.0), cplx(-5.0, 1.5), cplx(12.0, -9.0), cplx(0.2, -0.1)}) {
    const auto j0 = riccati_j(0, x), jj1 = riccati_j(1, x);
    EXPECT_LT(std::abs(j0.f.value() - std::sin(x)), 1e-13 * std::abs(std::sin(x)) + 1e-15) << x;
    EXPECT_LT(std::abs(jj1.f.value() - oracle::rj1(x)), 1e-12 * std::abs(oracle::rj1(x))) << x;
    EXPECT_LT(std::abs(jj1.df.value() - oracle::rj1p(x)), 1e-12 * std::abs(oracle::rj1p(x))) << x;
    const auto h1 = riccati_h(1, x);
    EXPECT_LT(std::abs(h1.f.value() - oracle::rh1(x)), 1e-12 * std::abs(oracle::rh1(x))) << x;
    EXPECT_LT(std::abs(h1.df.value() - oracle::rh1p(x)), 1e-12 * std::abs(oracle::rh1p(x))) << x;
    const auto y0 = riccati_y(0, x);
    EXPECT_LT(std::abs(y0.f.value() + std::cos(x)), 1e-12 * std::abs(std::cos(x))) << x;
  }
}

TEST(Bessel, WronskianAtHighOrder) {
  // j^ h^+' - j^' h^+ = i for every order.
  for (int L : {0, 3, 17, 40, 90})
    for (cplx x : {cplx(2.0, -0.5), cplx(30.0, -20.0), cplx(-8.0, -3.0), cplx(55.0, 1.0)}) {
      const auto j = riccati_j(L, x), h = riccati_h(L, x);
      const Scaled w = j.f * h.df - j.df * h.f;
      const double scale = std::exp((j.f * h.df).log_abs());
      EXPECT_LT(std::abs(w.value() - cplx(0, 1)), 1e-9 * std::max(1.0, scale)) << L << " " << x;
    }
}

TEST(Resonator, HarmonicMultiplicity) {
  EXPECT_EQ(harmonic_multiplicity(3, 0), 1u);
  EXPECT_EQ(harmonic_multiplicity(3, 2), 5u);
  EXPECT_EQ(harmonic_multiplicity(5, 1), 5u);
  EXPECT_EQ(harmonic_multiplicity(5, 2), 14u);
  EXPECT_EQ(riccati_order(5, 0), 1);
}

TEST(Resonator, PotentialValidation) {
  EXPECT_THROW(RadialPotential(4, {{1.0, 1.0}}), InvalidDimension);
  EXPECT_THROW(RadialPotential(3, {}), DomainError);
  EXPECT_THROW(RadialPotential(3, {{1.0, 1.0}, {0.5, 2.0}}), DomainError);
  const auto V = RadialPotential(3, {{0.5, 2.0}, {1.0, cplx(0, 1)}});
  EXPECT_FALSE(V.is_real());
  EXPECT_DOUBLE_EQ(V.support_radius(), 1.0);
}

TEST(Resonator, SWaveMatchesScalarOracle) {
  const auto V = RadialPotential::square_well(3, 1.0, -9.0);
  const Box box{-8.0, 8.0, -4.0, -1e-6};
  const auto ours = zeros_of(channel_zeros(V, 0, box));
  const auto ref = swave_oracle(1.0, -9.0, box);
  ASSERT_EQ(ours.size(), 4u);
  EXPECT_LE(match(ours, ref), 1e-8);
  const auto brute = oracle::grid_roots(
      [](cplx k) { return mzres::detail::swave_function(1.0, -9.0, k); }, -8.0, 8.0, -4.0, -1e-6);
  EXPECT_LE(match(ours, brute), 1e-8);
}

TEST(Resonator, PWaveMatchesClosedFormOracle) {
  for (cplx v : {cplx(6.0, 0.0), cplx(-9.0, 0.0), cplx(4.0, 2.0)}) {
    const auto V = RadialPotential::square_well(3, 1.0, v);
    const Box box{-7.03, 7.01, -5.0, -1e-3};
    const auto ours = zeros_of(channel_zeros(V, 1, box));
    const auto ref = oracle::grid_roots([v](cplx k) { return oracle::pwave_function(1.0, v, k); },
                                        box.x0, box.x1, box.y0, box.y1);
    EXPECT_FALSE(ours.empty()) << v;
    EXPECT_LE(match(ours, ref), 1e-8) << v;
  }
}

TEST(Resonator, ChannelDependsOnlyOnRiccatiOrder) {
  // d = 5, l = 0 and d = 3, l = 1 share L = 1.
  const Box box{-6.01, 6.03, -4.0, -1e-3};
  const auto a = zeros_of(channel_zeros(RadialPotential::square_well(3, 1.0, 6.0), 1, box));
  const auto b = zeros_of(channel_zeros(RadialPotential::square_well(5, 1.0, 6.0), 0, box));
  EXPECT_LE(match(a, b), 1e-9);
}

TEST(Resonator, SplitShellsAgreeWithSingleShell) {
  const auto one = RadialPotential::square_well(3, 1.0, 6.0);
  const auto three = RadialPotential(3, {{0.3, 6.0}, {0.55, 6.0}, {1.0, 6.0}});
  for (cplx k : {cplx(2.0, -1.0), cplx(-7.5, -0.3), cplx(15.0, -4.0)})
    for (int l : {0, 4}) {
      const cplx r = ratio(channel_det(three, l, k), channel_det(one, l, k));
      EXPECT_LT(std::abs(r - 1.0), 1e-11) << k << " l=" << l;
    }
}

TEST(Resonator, RealPotentialReflectionSymmetry) {
  // For real V, |D(-conj k)| = |D(k)| and zeros pair as (lambda, -conj lambda).
  const auto V = RadialPotential::square_well(3, 1.0, 6.0);
  for (cplx k : {cplx(2.0, -1.0), cplx(9.0, -3.0), cplx(0.4, -0.2)})
    for (int l : {0, 2, 7}) {
      const Scaled a = channel_det(V, l, k), b = channel_det(V, l, -std::conj(k));
      EXPECT_NEAR(a.log_abs(), b.log_abs(), 1e-10) << k << " l=" << l;
    }
  const auto z = zeros_of(channel_zeros(V, 2, Box{-10.013, 10.007, -6.0, -1e-3}));
  std::vector<cplx> mirrored;
  for (auto w : z) mirrored.push_back(-std::conj(w));
  EXPECT_LE(match(z, mirrored), 1e-8);
}

TEST(Resonator, ReflectionPhaseIsFixed) {
  // D(-conj k) / conj(D(k)) is one constant phase for real V.
  const auto V = RadialPotential(3, {{0.4, -3.0}, {1.0, 6.0}});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> re(-12.0, 12.0), im(-5.0, -0.05);
  for (int l : {0, 3}) {
    cplx phase = 0.0;
    for (int t = 0; t < 20; ++t) {
      const cplx k(re(rng), im(rng));
      const cplx r = ratio(channel_det(V, l, -std::conj(k)), conj(channel_det(V, l, k)));
      EXPECT_NEAR(std::abs(r), 1.0, 1e-10);
      if (t == 0) phase = r;
      EXPECT_LT(std::abs(r - phase), 1e-10) << k;
    }
  }
}

TEST(SWaveOracle, FreeLimitAndContinuity) {
  const Box box{-8.0, 8.0, -4.0, -1e-6};
  EXPECT_TRUE(swave_oracle(1.0, 1e-6, box).empty());
  const auto z0 = swave_oracle(1.0, -9.0, box), z1 = swave_oracle(1.0, -9.0 + 1e-4, box);
  ASSERT_EQ(z0.size(), z1.size());
  EXPECT_LE(match(z0, z1), 10 * 1e-4);
}

TEST(Resonator, OrderSumEqualsWinding) {
  const auto V = RadialPotential::square_well(3, 1.0, 6.0);
  auto s = ChannelSearch::for_channel(V, 3);
  for (const Box& b : {Box{-9.01, 9.03, -5.0, -1e-3}, Box{0.11, 7.0, -3.0, -0.01}}) {
    int total = 0;
    for (const auto& z : s.zeros(b)) total += z.order;
    EXPECT_EQ(total, s.winding(b));
  }
}

TEST(Resonator, FreePotentialHasNoResonances) {
  const auto V = RadialPotential::square_well(3, 1.0, 0.0);
  EXPECT_TRUE(V.is_zero());
  EXPECT_TRUE(channel_zeros(V, 0, Box{-5.01, 5.03, -3.0, -1e-3}).empty());
  const auto rs = resonances(V, 10.0);
  EXPECT_TRUE(rs.entries.empty());
  EXPECT_EQ(rs.total_multiplicity(), 0u);
}

TEST(Resonator, ChannelZerosRejectsOrigin) {
  const auto V = RadialPotential::square_well(3, 1.0, 6.0);
  EXPECT_THROW(channel_zeros(V, 0, Box{-1.0, 1.0, -1.0, 1.0}), DomainError);
}

TEST(Resonator, ResonanceSetStructure) {
  const auto V = RadialPotential::square_well(3, 1.0, 6.0);
  ResonanceOptions opt;
  opt.threads = 2;
  const auto rs = resonances(V, 10.0, opt);
  ASSERT_FALSE(rs.entries.empty());
  EXPECT_TRUE(rs.cutoff_margin_ok());
  EXPECT_EQ(rs.l_hint, channel_hint(1.0, 10.0));
  for (std::size_t i = 0; i < rs.entries.size(); ++i) {
    const auto& e = rs.entries[i];
    EXPECT_LT(e.lambda.imag(), 0.0);
    EXPECT_LE(std::abs(e.lambda), 10.0);
    EXPECT_EQ(e.harmonic_mult, harmonic_multiplicity(3, e.l));
    EXPECT_EQ(e.mult, e.harmonic_mult * static_cast<std::uint64_t>(e.channel_order));
    if (i) {
      EXPECT_LE(std::abs(rs.entries[i - 1].lambda), std::abs(e.lambda));
    }
  }
  // Real V: zeros pair as (lambda, -conj lambda), so both half-planes count alike.
  std::vector<cplx> z, mirrored;
  std::uint64_t left = 0, right = 0;
  for (const auto& e : rs.entries) {
    z.push_back(e.lambda + cplx(0.0, 1000.0 * e.l));
    mirrored.push_back(-std::conj(e.lambda) + cplx(0.0, 1000.0 * e.l));
    if (e.lambda.real() > 1e-8) right += e.mult;
    if (e.lambda.real() < -1e-8) left += e.mult;
  }
  EXPECT_LE(match(z, mirrored), 1e-8);
  EXPECT_EQ(left, right);
  // Tiling and thread count do not change the result.
  opt.threads = 1;
  opt.tiles = 3;
  const auto again = resonances(V, 10.0, opt);
  EXPECT_EQ(again.total_multiplicity(), rs.total_multiplicity());
  std::vector<cplx> x, y;
  for (const auto& e : rs.entries) x.push_back(e.lambda + cplx(1000.0 * e.l, 0.0));
  for (const auto& e : again.entries) y.push_back(e.lambda + cplx(1000.0 * e.l, 0.0));
  EXPECT_LE(match(x, y), 1e-9);
}

TEST(Resonator, RepulsiveWellHasNoBoundStates) {
  const auto rs = resonances(RadialPotential::square_well(3, 1.0, 6.0), 8.0);
  EXPECT_TRUE(rs.exceptional.empty());
}

TEST(Resonator, AttractiveWellBoundStatesOnImaginaryAxis) {
  // v = -9: q a = 3 > pi/2 gives one s-wave bound state i kappa with
  // sqrt(9 - kappa^2) cot(sqrt(9 - kappa^2)) = -kappa.
  const auto rs = resonances(RadialPotential::square_well(3, 1.0, -9.0), 6.0);
  ASSERT_FALSE(rs.exceptional.empty());
  bool found = false;
  for (const auto& e : rs.exceptional)
    if (e.l == 0) {
      const double kap = e.lambda.imag();
      const double q = std::sqrt(9.0 - kap * kap);
      EXPECT_NEAR(e.lambda.real(), 0.0, 1e-8);
      EXPECT_NEAR(q / std::tan(q), -kap, 1e-8);
      found = true;
    }
  EXPECT_TRUE(found);
}

#include <gtest/gtest.h>

#include <cmath>

#include "mzres/mzdist.hpp"
#include "mzres/verify.hpp"

using namespace mzres;

namespace {

const MZDistribution& m3() {
  static const MZDistribution m = MZDistribution::build(3);
  return m;
}

const MZDistribution& m5() {
  static const MZDistribution m = MZDistribution::build(5);
  return m;
}

// Sector mass from the ray integrals (no Chebyshev fit): composite Simpson
// in theta of the angular density, radial part integrated exactly.
double sector_mass_oracle(int d, double c_d, double t1, double t2, int n = 400) {
  auto dens = [d](double th) {
    const auto s = profile_sample(d, th);
    return d * d * s.h + s.ddh;
  };
  const double h = (t2 - t1) / n;
  double acc = dens(t1) + dens(t2);
  for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * dens(t1 + k * h);
  return acc * h / 3.0 / (2.0 * M_PI * c_d * d);
}

}  // namespace

TEST(MZDistribution, IdentitySuitePasses) {
  for (const auto* m : {&m3(), &m5()})
    for (const auto& c : identity_suite(*m))
      EXPECT_TRUE(c.pass()) << "d=" << m->dimension() << " " << c.name << ": " << c.value;
}

TEST(MZDistribution, KappaHomogeneityAndReflection) {
  for (cplx z : {cplx(0.3, -0.4), cplx(-0.8, -0.1), cplx(0.05, -1.2)}) {
    const double k = m3().kappa(z);
    for (double t : {0.5, 2.0}) EXPECT_NEAR(m3().kappa(t * z), t * k, 1e-10 * t * k);
    EXPECT_NEAR(m5().kappa(2.0 * z), 8.0 * m5().kappa(z), 1e-10 * 8.0 * m5().kappa(z));
    EXPECT_EQ(m3().kappa(std::conj(z)), k);
  }
  EXPECT_THROW(m3().kappa(0.5), DomainError);
}

TEST(MZDistribution, Mu0) {
  EXPECT_EQ(m3().mu0_density(0.0), 0.0);
  EXPECT_EQ(m3().mu0_density(-0.7), m3().mu0_density(0.7));
  EXPECT_NEAR(m3().mu0_mass(0.0, 1.0), m3().e_d() / (2 * M_PI * 3 * m3().c_d()), 1e-15);
  EXPECT_NEAR(m3().mu0_mass(-1.0, 0.0), m3().mu0_mass(0.0, 1.0), 1e-15);
}

TEST(MZDistribution, Potentials) {
  for (double x : {-1.5, 0.3, 2.0}) EXPECT_NEAR(m3().potential_H(x), 0.0, 1e-8);
  EXPECT_EQ(m3().potential_H(0.0), 0.0);
  for (cplx z : {cplx(0.4, 0.3), cplx(-0.2, -0.9)}) {
    EXPECT_NEAR(m3().potential_H(z),
                m3().potential_HZ(z) + m3().potential_HZ(std::conj(z)), 1e-15);
  }
  EXPECT_EQ(m3().potential_HZ(cplx(0.1, 0.5)), 0.0);
  // Laplacian at the spec point.
  const cplx z(0.5, -0.5);
  const double h = 1e-3;
  auto H = [](cplx w) { return m3().potential_H(w); };
  const double lap =
      (H(z + h) + H(z - h) + H(z + cplx(0, h)) + H(z - cplx(0, h)) - 4 * H(z)) / (h * h);
  EXPECT_NEAR(lap / (2 * M_PI * m3().kappa(z)), 1.0, 1e-2);
}

TEST(MZDistribution, UnitDiscHasMassOne) {
  const double lemma = m3().sector_mass(Sector(0.0, M_PI)) + 2 * m3().mu0_radius_mass();
  EXPECT_NEAR(lemma, 1.0, 1e-5);
  EXPECT_NEAR(m3().corollary_coefficient(Sector(0.0, M_PI)), 1.0, 1e-5);
  EXPECT_NEAR(m3().window_mass(Window::disc(0.0, 1.0), Variant::Closed), 1.0, 1e-5);
  EXPECT_NEAR(m5().window_mass(Window::disc(0.0, 1.0), Variant::Closed), 1.0, 1e-5);
}

TEST(MZDistribution, SectorAdditivityAndConventions) {
  const auto& m = m3();
  EXPECT_NEAR(m.sector_mass(Sector(0.2, 0.9)) + m.sector_mass(Sector(0.9, 2.5)),
              m.sector_mass(Sector(0.2, 2.5)), 1e-12);
  EXPECT_DOUBLE_EQ(m.corollary_coefficient(Sector(0.3, 1.2)), m.sector_mass(Sector(0.3, 1.2)));
  EXPECT_NEAR(m.corollary_coefficient(Sector(0.0, 1.0)),
              m.sector_mass(Sector(0.0, 1.0)) + m.mu0_radius_mass(), 1e-10);
  EXPECT_THROW(Sector(1.0, 0.5), GeometryError);
  EXPECT_THROW(Sector(-0.1, 0.5), GeometryError);
}

TEST(MZDistribution, SectorAgainstQuadratureOracle) {
  const double ref = sector_mass_oracle(3, m3().c_d(), 0.4, 1.1);
  EXPECT_NEAR(m3().sector_mass(Sector(0.4, 1.1)), ref, 1e-5);
  EXPECT_NEAR(m3().window_mass(Window::sector(Sector(0.4, 1.1))), ref, 1e-5);
}

TEST(MZDistribution, WindowMassProperties) {
  const auto& m = m3();
  EXPECT_NEAR(m.window_mass(Window::disc(0.0, 1.3), Variant::Closed), std::pow(1.3, 3),
              1e-5 * std::pow(1.3, 3));
  EXPECT_EQ(m.window_mass(Window::disc({0.2, 1.0}, 0.5), Variant::Closed), 0.0);
  const Window w = Window::sector_annulus(0.0, 1.0, 0.0, 1.0);
  EXPECT_NEAR(m.window_mass(w, Variant::Closed),
              m.sector_mass(Sector(0.0, 1.0)) + m.mu0_radius_mass(), 1e-5);
  for (double s : {0.5, 2.0}) {
    const Window d = Window::disc({0.1, -0.3}, 0.4);
    const double base = m.window_mass(d);
    EXPECT_NEAR(m.window_mass(d.scaled(s)), std::pow(s, 3) * base, 1e-5 * std::pow(s, 3) * base);
  }
}

TEST(Sampler, SupportAndDeterminism) {
  const auto a = m3().sample(5000, 42), b = m3().sample(5000, 42), c = m3().sample(5000, 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (const auto& z : a) {
    EXPECT_LE(z.imag(), 0.0);
    EXPECT_LE(std::abs(z), 1.0);
  }
}

TEST(Sampler, SectorFrequencyWithinThreeSigma) {
  const std::size_t n = 100000;
  const Sector s(0.4, 1.1);
  const Window w = Window::sector(s);
  const double p = m3().sector_mass(s);
  std::size_t hits = 0;
  for (const auto& z : m3().sample(n, 7)) hits += w.contains(z, Variant::LowerOpen, 0.0);
  const double freq = static_cast<double>(hits) / n;
  EXPECT_LE(std::abs(freq - p), 3.0 * std::sqrt(p * (1 - p) / n)) << freq << " vs " << p;
}

TEST(Sampler, AngularCdfIsMonotoneAndNormalized) {
  double prev = -1.0;
  for (int k = 0; k <= 200; ++k) {
    const double g = m3().angular_cdf(M_PI * k / 200.0);
    EXPECT_GE(g, prev - 1e-12);
    prev = g;
  }
  EXPECT_NEAR(m3().angular_cdf(0.0), 0.0, 1e-12);
}

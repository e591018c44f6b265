#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mzres/error.hpp"

namespace mzres {

using cplx = std::complex<double>;

/// Sector of the lower unit half-disc, {z in D : theta1 - pi < arg z < theta2 - pi}.
struct Sector {
  double theta1 = 0.0;
  double theta2 = M_PI;

  Sector() = default;
  Sector(double t1, double t2) : theta1(t1), theta2(t2) {
    if (!(0.0 <= t1 && t1 < t2 && t2 <= M_PI))
      throw GeometryError("sector requires 0 <= theta1 < theta2 <= pi");
  }
};

struct Disc {
  cplx center;
  double radius = 1.0;
};

struct Polygon {
  std::vector<cplx> vertices;
};

/// {z : theta1 - pi < arg z < theta2 - pi, r1 < |z| < r2}; with r1 = 0 and
/// r2 = 1 this is the sector of Sector(theta1, theta2).
struct SectorAnnulus {
  double theta1 = 0.0, theta2 = M_PI;
  double r1 = 0.0, r2 = 1.0;
};

/// How points on the boundary and on the real axis are counted: the four
/// admissible sets W with (Omega n C_-) c W c closure(Omega).
enum class Variant { LowerOpen, LowerClosed, Open, Closed };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::LowerOpen: return "lower_open";
    case Variant::LowerClosed: return "lower_closed";
    case Variant::Open: return "open";
    case Variant::Closed: return "closed";
  }
  return "?";
}

struct Interval {
  double lo, hi;
};

/// A bounded window Omega, dilated by `scale`.
class Window {
 public:
  using Shape = std::variant<Disc, Polygon, SectorAnnulus>;

  Window(Shape shape, double scale = 1.0) : shape_(std::move(shape)), scale_(scale) {
    validate();
  }

  static Window disc(cplx center, double radius) { return Window(Disc{center, radius}); }
  static Window polygon(std::vector<cplx> v) { return Window(Polygon{std::move(v)}); }
  static Window sector(const Sector& s) {
    return Window(SectorAnnulus{s.theta1, s.theta2, 0.0, 1.0});
  }
  static Window sector_annulus(double t1, double t2, double r1, double r2) {
    return Window(SectorAnnulus{t1, t2, r1, r2});
  }

  const Shape& shape() const { return shape_; }
  double scale() const { return scale_; }

  /// The same window dilated by a further factor s.
  Window scaled(double s) const { return Window(shape_, scale_ * s); }

  /// Signed distance to the boundary: positive inside, negative outside.
  double signed_distance(cplx z) const {
    const cplx u = z / scale_;
    return scale_ * std::visit([&](const auto& sh) { return sdist(sh, u); }, shape_);
  }

  double boundary_distance(cplx z) const { return std::abs(signed_distance(z)); }

  /// Membership in Omega (open) or its closure, with boundary tolerance eps
  /// measured in absolute units.
  bool contains(cplx z, bool closed, double eps = 1e-12) const {
    const double s = signed_distance(z);
    return closed ? s >= -eps : s > eps;
  }

  bool contains(cplx z, Variant v, double eps = 1e-12) const {
    switch (v) {
      case Variant::LowerOpen: return z.imag() < 0.0 && contains(z, false, eps);
      case Variant::LowerClosed: return z.imag() <= 0.0 && contains(z, false, eps);
      case Variant::Open: return contains(z, false, eps);
      case Variant::Closed: return contains(z, true, eps);
    }
    return false;
  }

  /// Radius of the smallest origin-centred disc containing the window.
  double circumradius() const {
    return scale_ * std::visit([](const auto& sh) { return circum(sh); }, shape_);
  }

  /// Axis-aligned bounding box (xmin, xmax, ymin, ymax).
  std::array<double, 4> bounding_box() const {
    auto b = std::visit([](const auto& sh) { return bbox(sh); }, shape_);
    for (double& v : b) v *= scale_;
    return b;
  }

  /// Set of r >= 0 with r e^{i alpha} in Omega, as disjoint intervals.
  std::vector<Interval> ray_intervals(double alpha) const {
    auto iv = std::visit([&](const auto& sh) { return ray(sh, alpha); }, shape_);
    for (auto& i : iv) i.lo *= scale_, i.hi *= scale_;
    return iv;
  }

  /// Angles in (-pi, pi] where the ray structure can change (tangencies,
  /// vertices, sector edges); used as quadrature breakpoints.
  std::vector<double> critical_angles() const {
    return std::visit([](const auto& sh) { return crit(sh); }, shape_);
  }

  /// Omega intersected with the real axis (closed = intersect the closure).
  std::vector<Interval> real_intervals(bool closed) const {
    auto iv = std::visit([&](const auto& sh) { return real(sh, closed); }, shape_);
    for (auto& i : iv) i.lo *= scale_, i.hi *= scale_;
    return iv;
  }

  std::string describe() const;

 private:
  void validate() const {
    if (!(scale_ > 0.0) || !std::isfinite(scale_))
      throw GeometryError("window scale must be positive and finite");
    std::visit([](const auto& sh) { check(sh); }, shape_);
  }

  static bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

  // ---- disc
  static void check(const Disc& s) {
    if (!finite(s.center) || !std::isfinite(s.radius))
      throw GeometryError("unbounded window");
    if (!(s.radius > 0.0)) throw GeometryError("disc radius must be positive");
  }
  static double sdist(const Disc& s, cplx z) { return s.radius - std::abs(z - s.center); }
  static double circum(const Disc& s) { return std::abs(s.center) + s.radius; }
  static std::array<double, 4> bbox(const Disc& s) {
    return {s.center.real() - s.radius, s.center.real() + s.radius,
            s.center.imag() - s.radius, s.center.imag() + s.radius};
  }
  static std::vector<Interval> ray(const Disc& s, double alpha) {
    const cplx e = std::polar(1.0, alpha);
    const double b = (e * std::conj(s.center)).real();
    const double c = std::norm(s.center) - s.radius * s.radius;
    const double disc = b * b - c;
    if (disc <= 0.0) return {};
    const double sq = std::sqrt(disc);
    const double hi = b + sq;
    if (hi <= 0.0) return {};
    return {{std::max(0.0, b - sq), hi}};
  }
  static std::vector<double> crit(const Disc& s) {
    const double m = std::abs(s.center);
    if (m <= s.radius) return {};
    const double a = std::arg(s.center);
    const double da = std::asin(s.radius / m);
    return {wrap(a - da), wrap(a + da)};
  }
  static std::vector<Interval> real(const Disc& s, bool) {
    const double y = s.center.imag();
    if (std::abs(y) >= s.radius) return {};
    const double hw = std::sqrt(s.radius * s.radius - y * y);
    return {{s.center.real() - hw, s.center.real() + hw}};
  }

  // ---- polygon
  static void check(const Polygon& p) {
    if (p.vertices.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
    double area = 0.0;
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
      if (!finite(p.vertices[i])) throw GeometryError("unbounded window");
      const cplx a = p.vertices[i], b = p.vertices[(i + 1) % p.vertices.size()];
      area += a.real() * b.imag() - b.real() * a.imag();
    }
    if (std::abs(area) < 1e-14) throw GeometryError("degenerate polygon (zero area)");
  }
  static double seg_dist(cplx z, cplx a, cplx b) {
    const cplx ab = b - a;
    const double t = std::clamp(((z - a) * std::conj(ab)).real() / std::norm(ab), 0.0, 1.0);
    return std::abs(z - (a + t * ab));
  }
  static bool inside(const Polygon& p, cplx z) {
    bool in = false;
    const auto& v = p.vertices;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
      if ((v[i].imag() > z.imag()) != (v[j].imag() > z.imag())) {
        const double x = v[j].real() + (z.imag() - v[j].imag()) *
                                           (v[i].real() - v[j].real()) /
                                           (v[i].imag() - v[j].imag());
        if (z.real() < x) in = !in;
      }
    }
    return in;
  }
  static double sdist(const Polygon& p, cplx z) {
    double m = INFINITY;
    const auto& v = p.vertices;
    for (std::size_t i = 0; i < v.size(); ++i)
      m = std::min(m, seg_dist(z, v[i], v[(i + 1) % v.size()]));
    return inside(p, z) ? m : -m;
  }
  static double circum(const Polygon& p) {
    double m = 0.0;
    for (auto v : p.vertices) m = std::max(m, std::abs(v));
    return m;
  }
  static std::array<double, 4> bbox(const Polygon& p) {
    std::array<double, 4> b{INFINITY, -INFINITY, INFINITY, -INFINITY};
    for (auto v : p.vertices) {
      b[0] = std::min(b[0], v.real());
      b[1] = std::max(b[1], v.real());
      b[2] = std::min(b[2], v.imag());
      b[3] = std::max(b[3], v.imag());
    }
    return b;
  }
  // Crossing parameters of the line {origin + s dir} with the polygon
  // edges, turned into inside intervals by midpoint tests.
  static std::vector<Interval> line_cut(const Polygon& p, cplx origin, cplx dir,
                                        double smin) {
    std::vector<double> ts{smin};
    const auto& v = p.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const cplx a = v[i], b = v[(i + 1) % v.size()];
      const cplx e = b - a;
      const double den = dir.real() * (-e.imag()) - dir.imag() * (-e.real());
      if (std::abs(den) < 1e-300) continue;
      const cplx rhs = a - origin;
      const double s = (rhs.real() * (-e.imag()) - rhs.imag() * (-e.real())) / den;
      const double u = (dir.real() * rhs.imag() - dir.imag() * rhs.real()) / den;
      if (u >= -1e-15 && u <= 1.0 + 1e-15 && s > smin) ts.push_back(s);
    }
    std::sort(ts.begin(), ts.end());
    std::vector<Interval> out;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
      if (ts[i + 1] - ts[i] <= 0.0) continue;
      const double mid = 0.5 * (ts[i] + ts[i + 1]);
      if (!inside(p, origin + mid * dir)) continue;
      if (!out.empty() && out.back().hi == ts[i]) out.back().hi = ts[i + 1];
      else out.push_back({ts[i], ts[i + 1]});
    }
    return out;
  }
  static std::vector<Interval> ray(const Polygon& p, double alpha) {
    return line_cut(p, 0.0, std::polar(1.0, alpha), 0.0);
  }
  static std::vector<double> crit(const Polygon& p) {
    std::vector<double> a;
    for (auto v : p.vertices)
      if (std::abs(v) > 0.0) a.push_back(std::arg(v));
    return a;
  }
  static std::vector<Interval> real(const Polygon& p, bool) {
    auto b = bbox(p);
    if (b[2] > 0.0 || b[3] < 0.0) return {};
    const double x0 = b[0] - 1.0;
    auto iv = line_cut(p, cplx(x0, 0.0), cplx(1.0, 0.0), 0.0);
    for (auto& i : iv) i.lo += x0, i.hi += x0;
    return iv;
  }

  // ---- sector annulus (in the lower half-plane)
  static void check(const SectorAnnulus& s) {
    if (!(0.0 <= s.theta1 && s.theta1 < s.theta2 && s.theta2 <= M_PI))
      throw GeometryError("sector requires 0 <= theta1 < theta2 <= pi");
    if (!(0.0 <= s.r1 && s.r1 < s.r2) || !std::isfinite(s.r2))
      throw GeometryError("sector annulus requires 0 <= r1 < r2 < inf");
  }
  static double sdist(const SectorAnnulus& s, cplx z) {
    const double a1 = s.theta1 - M_PI, a2 = s.theta2 - M_PI;
    const double r = std::abs(z);
    double a = std::arg(z);
    if (a == M_PI) a = -M_PI;
    const bool in_angle = a > a1 && a < a2 && z.imag() < 0.0;
    const bool in = in_angle && r > s.r1 && r < s.r2;
    auto edge = [&](double ang) {
      const cplx e = std::polar(1.0, ang);
      return seg_dist(z, s.r1 * e, s.r2 * e);
    };
    auto arc = [&](double rad) {
      if (rad == 0.0) return r;
      if (in_angle || (a >= a1 && a <= a2)) return std::abs(r - rad);
      return std::min(std::abs(z - std::polar(rad, a1)), std::abs(z - std::polar(rad, a2)));
    };
    const double m = std::min({edge(a1), edge(a2), arc(s.r1), arc(s.r2)});
    return in ? m : -m;
  }
  static double circum(const SectorAnnulus& s) { return s.r2; }
  static std::array<double, 4> bbox(const SectorAnnulus& s) {
    return {-s.r2, s.r2, -s.r2, 0.0};
  }
  static std::vector<Interval> ray(const SectorAnnulus& s, double alpha) {
    if (alpha > s.theta1 - M_PI && alpha < s.theta2 - M_PI) return {{s.r1, s.r2}};
    return {};
  }
  static std::vector<double> crit(const SectorAnnulus& s) {
    return {s.theta1 - M_PI, s.theta2 - M_PI};
  }
  static std::vector<Interval> real(const SectorAnnulus& s, bool closed) {
    if (!closed) return {};
    std::vector<Interval> out;
    if (s.theta1 == 0.0) out.push_back({-s.r2, -s.r1});
    if (s.theta2 == M_PI) out.push_back({s.r1, s.r2});
    return out;
  }

  static double wrap(double a) {
    while (a <= -M_PI) a += 2.0 * M_PI;
    while (a > M_PI) a -= 2.0 * M_PI;
    return a;
  }

  Shape shape_;
  double scale_ = 1.0;
};

inline std::string Window::describe() const {
  char buf[256];
  if (auto* d = std::get_if<Disc>(&shape_)) {
    std::snprintf(buf, sizeof buf, "disc(%g%+gi,%g)x%g", d->center.real(), d->center.imag(),
                  d->radius, scale_);
  } else if (auto* s = std::get_if<SectorAnnulus>(&shape_)) {
    std::snprintf(buf, sizeof buf, "sector(%g,%g,%g,%g)x%g", s->theta1, s->theta2, s->r1,
                  s->r2, scale_);
  } else {
    std::snprintf(buf, sizeof buf, "polygon(%zu)x%g",
                  std::get<Polygon>(shape_).vertices.size(), scale_);
  }
  return buf;
}

}  // namespace mzres

#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "mzres/bessel.hpp"
#include "mzres/complexfn.hpp"
#include "mzres/error.hpp"
#include "mzres/scaled.hpp"

namespace mzres {

struct Shell {
  double radius;  ///< outer radius of the shell
  cplx value;     ///< constant potential value on the shell
};

/// Piecewise-constant radial potential in odd dimension d, supported in the
/// ball of radius a = outer radius of the last shell.
class RadialPotential {
 public:
  RadialPotential() = default;
  RadialPotential(int d, std::vector<Shell> shells) : d_(d), shells_(std::move(shells)) {
    require_odd_dimension(d_);
    if (shells_.empty()) throw DomainError("potential needs at least one shell");
    double prev = 0.0;
    for (const auto& s : shells_) {
      if (!(s.radius > prev) || !std::isfinite(s.radius))
        throw DomainError("shell radii must be positive and strictly increasing");
      prev = s.radius;
    }
  }

  /// Single shell of radius a and constant value v.
  static RadialPotential square_well(int d, double a, cplx v) {
    return RadialPotential(d, {{a, v}});
  }

  int dimension() const { return d_; }
  double support_radius() const { return shells_.back().radius; }
  const std::vector<Shell>& shells() const { return shells_; }

  bool is_zero() const {
    return std::all_of(shells_.begin(), shells_.end(),
                       [](const Shell& s) { return s.value == cplx(0.0, 0.0); });
  }
  bool is_real() const {
    return std::all_of(shells_.begin(), shells_.end(),
                       [](const Shell& s) { return s.value.imag() == 0.0; });
  }
  /// Nonvanishing at the edge of the support.
  bool edge_nonzero() const { return shells_.back().value != cplx(0.0, 0.0); }
  double max_abs_value() const {
    double m = 0.0;
    for (const auto& s : shells_) m = std::max(m, std::abs(s.value));
    return m;
  }

 private:
  int d_ = 3;
  std::vector<Shell> shells_;
};

/// Order of the Riccati-Bessel functions in channel l: the radial equation
/// has index nu = l + (d-2)/2 = L + 1/2.
inline int riccati_order(int d, int l) { return l + (d - 3) / 2; }

/// Dimension of the degree-l spherical harmonics in d variables.
inline std::uint64_t harmonic_multiplicity(int d, int l) {
  if (l == 0) return 1;
  // (2l + d - 2) (l + d - 3)! / (l! (d - 2)!) = (2l + d - 2)/(d - 2) * C(l + d - 3, l)
  std::uint64_t binom = 1;
  for (int i = 1; i <= d - 3; ++i) binom = binom * (l + i) / i;
  return static_cast<std::uint64_t>(2 * l + d - 2) * binom / static_cast<std::uint64_t>(d - 2);
}

namespace detail {

inline Scaled scaled_pow(cplx k, int n) {
  if (n == 0) return Scaled(1.0);
  return Scaled::exp(static_cast<double>(n) * std::log(k));
}

// Solution data (u, u') at a radius, in scaled form.
struct Cauchy {
  Scaled u, du;
};

// Propagate (u, u') across a shell with wave number q from r1 to r2, using
// the basis (f, g) with constant Wronskian W in x = q r.
inline Cauchy propagate(const Cauchy& in, int L, cplx q, double r1, double r2) {
  const cplx x1 = q * r1, x2 = q * r2;
  const bool hankel = std::abs(x1) > L + 2.0;
  bessel::Pair f1, g1, f2, g2;
  cplx W;
  if (hankel) {
    f1 = bessel::riccati_h(L, x1), g1 = bessel::riccati_h_minus(L, x1);
    f2 = bessel::riccati_h(L, x2), g2 = bessel::riccati_h_minus(L, x2);
    W = cplx(0.0, -2.0);
  } else {
    f1 = bessel::riccati_j(L, x1), g1 = bessel::riccati_y(L, x1);
    f2 = bessel::riccati_j(L, x2), g2 = bessel::riccati_y(L, x2);
    W = 1.0;
  }
  // Phi(r) = [[f, g], [q f', q g']], Phi^{-1} = [[q g', -g], [-q f', f]] / (q W).
  const cplx qW = q * W;
  const Scaled alpha = (g1.df * q * in.u - g1.f * in.du) / qW;
  const Scaled beta = (f1.f * in.du - f1.df * q * in.u) / qW;
  return {alpha * f2.f + beta * g2.f, (alpha * f2.df + beta * g2.df) * q};
}

inline cplx shell_wavenumber(cplx k, cplx v) {
  cplx q = std::sqrt(k * k - v);
  // The transfer matrices are even in q; q = 0 only needs to be avoided.
  if (std::abs(q) < 1e-150) q = 1e-150;
  return q;
}

}  // namespace detail

/// Channel determinant D_l(k).
///
/// The interior solution is regular at the origin, normalised as
/// j^_L(q1 r) / q1^{L+1} so that it depends on q1^2 only, and is carried
/// outward by the shell propagators. It is matched at r = a against the
/// outgoing solution h^+_L(k r):
///   D_l(k) = k^L e^{-ika} [u(a) k h^+'(ka) - u'(a) h^+(ka)].
/// The factor k^L cancels the pole of h^+ at k = 0, so D_l is entire and
/// equals i e^{-ika} for the zero potential. Zeros in Im k < 0 are the
/// resonances of the channel.
inline Scaled channel_det(const RadialPotential& V, int l, cplx k) {
  if (l < 0) throw DomainError("angular momentum must be >= 0");
  if (k == cplx(0.0, 0.0)) k = 1e-150;
  const int L = riccati_order(V.dimension(), l);
  const auto& sh = V.shells();
  const cplx q1 = detail::shell_wavenumber(k, sh[0].value);
  const double r1 = sh[0].radius;
  detail::Cauchy c;
  {
    const cplx x = q1 * r1;
    if (std::abs(x) < 1e-8) {
      // Leading terms of j^_L(x) / q^{L+1} = r^{L+1} / (2L+1)!! (1 - x^2 / (2(2L+3))).
      double df = 1.0;
      for (int n = 3; n <= 2 * L + 1; n += 2) df *= n;
      const cplx corr = 1.0 - x * x / (2.0 * (2.0 * L + 3.0));
      c.u = Scaled(std::pow(r1, L + 1) / df * corr);
      c.du = Scaled((L + 1.0) * std::pow(r1, L) / df *
                    (1.0 - (L + 3.0) * x * x / (2.0 * (L + 1.0) * (2.0 * L + 3.0))));
    } else {
      const auto j = bessel::riccati_j(L, x);
      const Scaled qL = detail::scaled_pow(q1, L);
      c.u = j.f / (qL * q1);
      c.du = j.df / qL;
    }
  }
  for (std::size_t s = 1; s < sh.size(); ++s) {
    const cplx q = detail::shell_wavenumber(k, sh[s].value);
    c = detail::propagate(c, L, q, sh[s - 1].radius, sh[s].radius);
  }
  const double a = V.support_radius();
  const auto h = bessel::riccati_h(L, k * a);
  const Scaled pref = detail::scaled_pow(k, L) * Scaled::exp(cplx(0.0, -1.0) * k * a);
  return pref * (c.u * h.df * k - c.du * h.f);
}

/// Axis-aligned rectangle [x0, x1] x [y0, y1] in the k-plane.
struct Box {
  double x0, x1, y0, y1;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(cplx z, double margin = 0.0) const {
    return z.real() >= x0 - margin && z.real() <= x1 + margin && z.imag() >= y0 - margin &&
           z.imag() <= y1 + margin;
  }
  /// Distance from the origin to the nearest point of the box.
  double min_modulus() const {
    const double x = std::clamp(0.0, x0, x1), y = std::clamp(0.0, y0, y1);
    return std::abs(cplx(x, y));
  }
};

struct ChannelZero {
  cplx zero;
  int order = 1;
  double residual = 0.0;
};

struct SearchOptions {
  double tol = 1e-10;         ///< accepted Newton step size (relative to max(1,|k|))
  double min_box = 1e-5;      ///< boxes this small with winding >= 2 are multiple zeros
  double max_modulus = INFINITY;  ///< discard boxes entirely beyond this modulus
};

/// Argument-principle zero search for one channel determinant.
///
/// Each box boundary is traversed counter-clockwise; every edge is sampled
/// on a dyadic grid and bisected until consecutive phase increments are
/// below pi/4 and agree with the undivided increment. Values are cached so
/// sub-boxes reuse the samples of their parent's edges.
class ChannelSearch {
 public:
  using Func = std::function<Scaled(cplx)>;

  ChannelSearch(Func f, double phase_scale, SearchOptions opt = {})
      : f_(std::move(f)), h0_(0.25 / std::max(phase_scale, 1e-3)), opt_(opt) {}

  static ChannelSearch for_channel(const RadialPotential& V, int l, SearchOptions opt = {}) {
    return ChannelSearch([V, l](cplx k) { return channel_det(V, l, k); },
                         V.support_radius(), opt);
  }

  /// Winding number of f around the boundary of the box.
  int winding(const Box& b) {
    const cplx c[4] = {{b.x0, b.y0}, {b.x1, b.y0}, {b.x1, b.y1}, {b.x0, b.y1}};
    double total = 0.0;
    for (int i = 0; i < 4; ++i) total += edge_phase(c[i], c[(i + 1) % 4]);
    const double w = total / (2.0 * M_PI);
    const double rw = std::round(w);
    if (std::abs(w - rw) > 0.1)
      throw ContourError("non-integer winding " + std::to_string(w));
    return static_cast<int>(rw);
  }

  /// All zeros inside the box with their orders.
  std::vector<ChannelZero> zeros(const Box& root) {
    std::vector<ChannelZero> out;
    search(root, winding(root), out, 0);
    return out;
  }

  Scaled eval(cplx z) {
    const Key key{std::bit_cast<std::uint64_t>(z.real()), std::bit_cast<std::uint64_t>(z.imag())};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    ++evaluations_;
    const Scaled v = f_(z);
    if (cache_.size() < 4'000'000) cache_.emplace(key, v);
    return v;
  }

  /// Newton iteration with a central-difference derivative. Returns the
  /// root and the last step size, or nothing if the iteration diverges.
  std::optional<ChannelZero> newton(cplx z) {
    double step = INFINITY;
    for (int it = 0; it < 60; ++it) {
      const double s = std::max(1.0, std::abs(z));
      const double h = 1e-7 * s;
      const Scaled f0 = f_(z);
      if (f0.is_zero()) return ChannelZero{z, 1, 0.0};
      const cplx rp = ratio(f_(z + h), f0), rm = ratio(f_(z - h), f0);
      const cplx denom = rp - rm;
      if (denom == cplx(0.0, 0.0) || !std::isfinite(std::abs(denom))) return std::nullopt;
      cplx dz = 2.0 * h / denom;
      if (std::abs(dz) > 0.5 * s) dz *= 0.5 * s / std::abs(dz);
      z -= dz;
      step = std::abs(dz) / s;
      if (step < 1e-14) break;
    }
    if (!(step <= opt_.tol)) return std::nullopt;
    return ChannelZero{z, 1, step};
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  struct Key {
    std::uint64_t x, y;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<std::uint64_t>()(k.x * 0x9E3779B97F4A7C15ull ^ (k.y + 0x632BE59BD9B4E019ull));
    }
  };

  static double dphase(const Scaled& a, const Scaled& b) { return std::arg(b.mantissa() / a.mantissa()); }

  double edge_phase(cplx a, cplx b) {
    const double len = std::abs(b - a);
    int n = 4;
    while (n < (1 << 20) && len / n > h0_) n *= 2;
    double total = 0.0;
    Scaled fa = eval(a);
    for (int i = 1; i <= n; ++i) {
      const cplx zb = i == n ? b : a + (b - a) * (static_cast<double>(i) / n);
      const cplx za = a + (b - a) * (static_cast<double>(i - 1) / n);
      const Scaled fb = eval(zb);
      total += segment_phase(za, fa, zb, fb, 0);
      fa = fb;
    }
    return total;
  }

  double segment_phase(cplx a, const Scaled& fa, cplx b, const Scaled& fb, int depth) {
    if (fa.is_zero() || fb.is_zero()) throw ContourError("zero on contour");
    const cplx m = 0.5 * (a + b);
    const Scaled fm = eval(m);
    if (fm.is_zero()) throw ContourError("zero on contour");
    const double d = dphase(fa, fb), d1 = dphase(fa, fm), d2 = dphase(fm, fb);
    if (std::abs(d1) < M_PI / 4 && std::abs(d2) < M_PI / 4 && std::abs(d1 + d2 - d) < 1e-9)
      return d1 + d2;
    if (depth > 48 || std::abs(b - a) < 1e-12 * std::max(1.0, std::abs(a)))
      throw ContourError("zero on or near contour at " + std::to_string(m.real()) + "," +
                         std::to_string(m.imag()));
    return segment_phase(a, fa, m, fm, depth + 1) + segment_phase(m, fm, b, fb, depth + 1);
  }

  void search(const Box& b, int w, std::vector<ChannelZero>& out, int depth) {
    if (w == 0) return;
    if (w < 0) throw ContourError("negative winding in zero search");
    if (b.min_modulus() > opt_.max_modulus) return;
    if (w == 1) {
      if (auto z = newton(b.center()); z && b.contains(z->zero)) {
        out.push_back(*z);
        return;
      }
    }
    const double size = std::max(b.width(), b.height());
    if (size < opt_.min_box) {
      auto z = newton(b.center());
      ChannelZero cz{z ? z->zero : b.center(), w, z ? z->residual : size};
      if (!z || !b.contains(cz.zero, size)) cz.zero = b.center(), cz.residual = size;
      out.push_back(cz);
      return;
    }
    // Split the longer side; a zero on the split line shifts the split.
    static constexpr double fractions[] = {0.5, 0.5 + 0.0123, 0.5 - 0.0311, 0.5 + 0.0719};
    for (double frac : fractions) {
      Box p = b, q = b;
      if (b.width() >= b.height()) {
        const double xm = b.x0 + frac * b.width();
        p.x1 = xm, q.x0 = xm;
      } else {
        const double ym = b.y0 + frac * b.height();
        p.y1 = ym, q.y0 = ym;
      }
      int wp, wq;
      try {
        wp = winding(p);
        wq = winding(q);
      } catch (const ContourError&) {
        continue;
      }
      if (wp + wq != w) continue;
      search(p, wp, out, depth + 1);
      search(q, wq, out, depth + 1);
      return;
    }
    throw ContourError("could not split box [" + std::to_string(b.x0) + "," + std::to_string(b.x1) +
                       "]x[" + std::to_string(b.y0) + "," + std::to_string(b.y1) +
                       "] with winding " + std::to_string(w));
  }

  Func f_;
  double h0_;
  SearchOptions opt_;
  std::unordered_map<Key, Scaled, KeyHash> cache_;
  std::size_t evaluations_ = 0;
};

/// Zeros of D_l inside the box, each with its order. Sum of orders equals
/// the winding number of the box.
inline std::vector<ChannelZero> channel_zeros(const RadialPotential& V, int l, const Box& box,
                                              double tol = 1e-10) {
  if (box.contains(0.0, 10 * tol))
    throw DomainError("channel_zeros box must avoid k = 0");
  SearchOptions opt;
  opt.tol = tol;
  return ChannelSearch::for_channel(V, l, opt).zeros(box);
}

struct ResonanceEntry {
  cplx lambda;
  int l = 0;
  int channel_order = 1;
  std::uint64_t harmonic_mult = 1;
  std::uint64_t mult = 1;  ///< channel_order * harmonic_mult
  double residual = 0.0;
};

struct ChannelStatus {
  int l = 0;
  int zeros = 0;     ///< channel zeros (with order) in the search region
  bool complete = false;
};

struct ResonanceSet {
  RadialPotential potential;
  double search_radius = 0.0;
  std::vector<ResonanceEntry> entries;      ///< Im lambda < 0, sorted by |lambda|
  std::vector<ResonanceEntry> exceptional;  ///< zeros in the closed upper half-plane
  std::vector<ChannelStatus> channels;
  int l_hint = 0;              ///< barrier estimate of the last populated channel
  int highest_nonempty_l = -1;

  /// Largest populated channel stays at least 5 below the barrier estimate.
  bool cutoff_margin_ok() const { return highest_nonempty_l <= l_hint - 5; }
  /// Total count with multiplicity.
  std::uint64_t total_multiplicity() const {
    std::uint64_t n = 0;
    for (const auto& e : entries) n += e.mult;
    return n;
  }
};

struct ResonanceOptions {
  double tol = 1e-10;
  int l_stop = 3;     ///< stop after this many consecutive empty channels
  int threads = 0;    ///< 0 = hardware concurrency
  int max_l = 2000;
  int tiles = 1;      ///< initial tiling of the search region per axis
};

/// Barrier estimate l_max = ceil(e a R / 2) + 10 of the last channel that
/// can hold zeros of modulus <= R. The channel scan never stops before it.
inline int channel_hint(double a, double R) {
  return static_cast<int>(std::ceil(std::exp(1.0) * a * R / 2.0)) + 10;
}

namespace detail {

inline void sort_entries(std::vector<ResonanceEntry>& v) {
  std::sort(v.begin(), v.end(), [](const ResonanceEntry& p, const ResonanceEntry& q) {
    const double a = std::abs(p.lambda), b = std::abs(q.lambda);
    if (a != b) return a < b;
    if (p.lambda.real() != q.lambda.real()) return p.lambda.real() < q.lambda.real();
    if (p.lambda.imag() != q.lambda.imag()) return p.lambda.imag() < q.lambda.imag();
    return p.l < q.l;
  });
}

// Zeros of one channel: lower half of the disc |k| <= R, plus the upper
// region where eigenvalues can sit (|k|^2 <= max |V|).
inline std::pair<std::vector<ChannelZero>, std::vector<ChannelZero>> scan_channel(
    const RadialPotential& V, int l, double R, double tol, int tiles = 1) {
  SearchOptions opt;
  opt.tol = tol;
  opt.max_modulus = R;
  // Asymmetric extent keeps dyadic split lines off the imaginary axis.
  const double x0 = -R * 1.0031 - 1e-3, x1 = R * 1.0057 + 1e-3;
  const double ybot = -R * 1.0043 - 1e-3;
  const double K = std::min(R, std::sqrt(V.max_abs_value()) + 1.0);
  std::vector<ChannelZero> lower, upper;
  for (int attempt = 0;; ++attempt) {
    // Deterministic outward jitter after a zero on the tiling.
    const double jit = 1e-7 * attempt;
    lower.clear();
    upper.clear();
    try {
      ChannelSearch s = ChannelSearch::for_channel(V, l, opt);
      const double X0 = x0 - jit, X1 = x1 + jit, Y0 = ybot - jit, Y1 = jit;
      const double dx = (X1 - X0) / tiles, dy = (Y1 - Y0) / tiles;
      for (int i = 0; i < tiles; ++i)
        for (int j = 0; j < tiles; ++j) {
          const Box b{X0 + i * dx, i + 1 == tiles ? X1 : X0 + (i + 1) * dx, Y0 + j * dy,
                      j + 1 == tiles ? Y1 : Y0 + (j + 1) * dy};
          if (b.min_modulus() > R) continue;
          auto z = s.zeros(b);
          lower.insert(lower.end(), z.begin(), z.end());
        }
      if (!V.is_zero()) upper = s.zeros({X0, X1, jit, K + jit});
      break;
    } catch (const ContourError& e) {
      if (attempt >= 3) throw ContourError("channel " + std::to_string(l) + ": " + e.what());
    }
  }
  return {lower, upper};
}

}  // namespace detail

/// Resonances of -Delta + V with modulus <= R, channel by channel, each
/// counted with multiplicity channel order x harmonic multiplicity.
inline ResonanceSet resonances(const RadialPotential& V, double R, ResonanceOptions opt = {}) {
  if (!(R > 0.0)) throw DomainError("search radius must be positive");
  ResonanceSet rs;
  rs.potential = V;
  rs.search_radius = R;
  rs.l_hint = channel_hint(V.support_radius(), R);
  if (V.is_zero()) return rs;
  const int d = V.dimension();
  int threads = opt.threads > 0 ? opt.threads
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int empty_run = 0;
  int l_next = 0;
  bool done = false;
  while (!done && l_next <= opt.max_l) {
    const int batch = threads;
    std::vector<std::pair<std::vector<ChannelZero>, std::vector<ChannelZero>>> res(batch);
    std::vector<std::exception_ptr> errs(batch);
    std::atomic<int> next{0};
    {
      std::vector<std::jthread> pool;
      for (int t = 0; t < std::min(batch, threads); ++t)
        pool.emplace_back([&] {
          for (int i; (i = next++) < batch;) {
            try {
              res[i] = detail::scan_channel(V, l_next + i, R, opt.tol, opt.tiles);
            } catch (...) {
              errs[i] = std::current_exception();
            }
          }
        });
    }
    for (int i = 0; i < batch && !done; ++i) {
      if (errs[i]) std::rethrow_exception(errs[i]);
      const int l = l_next + i;
      const auto hm = harmonic_multiplicity(d, l);
      int count = 0;
      for (const auto& z : res[i].first) {
        if (std::abs(z.zero) > R || z.zero.imag() >= 0.0) continue;
        rs.entries.push_back({z.zero, l, z.order, hm, hm * z.order, z.residual});
        count += z.order;
      }
      for (const auto& z : res[i].second) {
        if (std::abs(z.zero) > R || z.zero.imag() < 0.0) continue;
        rs.exceptional.push_back({z.zero, l, z.order, hm, hm * z.order, z.residual});
      }
      rs.channels.push_back({l, count, true});
      if (count > 0) {
        rs.highest_nonempty_l = l;
        empty_run = 0;
      } else if (++empty_run >= opt.l_stop && l >= rs.l_hint) {
        done = true;
      }
    }
    l_next += batch;
  }
  detail::sort_entries(rs.entries);
  detail::sort_entries(rs.exceptional);
  return rs;
}

}  // namespace mzres

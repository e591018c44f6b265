#pragma once

#include <cmath>
#include <complex>

#include "mzres/scaled.hpp"

namespace mzres::bessel {

using cplx = std::complex<double>;

/// Value and x-derivative of a Riccati-Bessel function of integer order.
struct Pair {
  Scaled f;
  Scaled df;
};

namespace detail {

// Running pair (prev, cur) of a three-term recurrence sharing one binary
// exponent, rescaled whenever the magnitudes drift.
struct Recur {
  cplx prev, cur;
  long e = 0;
  void rescale() {
    const double a = std::max(std::abs(cur), std::abs(prev));
    if (a == 0.0) return;
    const int k = std::ilogb(a);
    if (k > 200 || k < -200) {
      prev = {std::ldexp(prev.real(), -k), std::ldexp(prev.imag(), -k)};
      cur = {std::ldexp(cur.real(), -k), std::ldexp(cur.imag(), -k)};
      e += k;
    }
  }
};

// Upward recurrence f_{n+1} = (2n+1)/x f_n - f_{n-1} from exact f_0, f_1.
// Returns (f_L, f_{L-1}) in scaled form (f_{-1} slot unused when L = 0).
inline std::pair<Scaled, Scaled> upward(int L, cplx x, Scaled f0, Scaled f1) {
  if (L == 0) return {f0, Scaled()};
  if (L == 1) return {f1, f0};
  // Bring both seeds onto a common exponent.
  const long e0 = std::max(f0.exponent(), f1.exponent());
  Recur r{ratio(f0, Scaled(1.0, e0)), ratio(f1, Scaled(1.0, e0)), e0};
  const cplx inv = 1.0 / x;
  for (int n = 1; n < L; ++n) {
    const cplx next = (2.0 * n + 1.0) * inv * r.cur - r.prev;
    r.prev = r.cur;
    r.cur = next;
    r.rescale();
  }
  return {Scaled(r.cur, r.e), Scaled(r.prev, r.e)};
}

inline Scaled riccati_j1(cplx x) {
  // sin x / x - cos x, by series for small |x| to avoid cancellation.
  if (std::abs(x) < 0.5) {
    const cplx x2 = x * x;
    cplx term = x2 / 3.0, sum = term;
    for (int k = 1; k < 12; ++k) {
      term *= -x2 / (2.0 * k * (2.0 * k + 3.0));
      sum += term;
    }
    return Scaled(sum);
  }
  return Scaled(std::sin(x) / x - std::cos(x));
}

}  // namespace detail

/// Regular Riccati-Bessel function j^_L(x) = x j_L(x) and its derivative,
/// by Miller's downward recurrence normalised against j^_0 = sin x or j^_1.
inline Pair riccati_j(int L, cplx x) {
  if (x == cplx(0.0, 0.0)) {
    return {Scaled(), L == 0 ? Scaled(1.0) : Scaled()};
  }
  const int N = L + static_cast<int>(std::ceil(std::abs(x))) + 40;
  const cplx inv = 1.0 / x;
  detail::Recur r{0.0, 1e-30, 0};  // prev = f_{n+1}, cur = f_n, start n = N
  cplx fL = 0.0, fLm1 = 0.0;
  long eL = 0, eLm1 = 0;
  cplx f1 = 0.0;
  long e1 = 0;
  for (int n = N; n >= 1; --n) {
    // f_{n-1} = (2n+1)/x f_n - f_{n+1}
    const cplx next = (2.0 * n + 1.0) * inv * r.cur - r.prev;
    r.prev = r.cur;
    r.cur = next;
    r.rescale();
    // now cur = f_{n-1}, prev = f_n
    if (n == L) fL = r.prev, eL = r.e;
    if (n - 1 == L) fL = r.cur, eL = r.e;
    if (n - 1 == L - 1) fLm1 = r.cur, eLm1 = r.e;
    if (n == 1) f1 = r.prev, e1 = r.e;
  }
  const cplx f0 = r.cur;
  const long e0 = r.e;
  // Normalisation: pick the better-conditioned exact value.
  const cplx s0 = std::sin(x);
  Scaled scale;
  if (std::abs(x) < 1.0 || std::abs(s0) >= 0.5 * std::abs(std::cos(x))) {
    scale = Scaled(s0) / Scaled(f0, e0);
  } else {
    scale = detail::riccati_j1(x) / Scaled(f1, e1);
  }
  Pair out;
  out.f = Scaled(fL, eL) * scale;
  if (L == 0) {
    out.df = Scaled(std::cos(x));
  } else {
    out.df = Scaled(fLm1, eLm1) * scale - out.f * (static_cast<double>(L) * inv);
  }
  return out;
}

inline Pair riccati_h(int L, cplx x);
inline Pair riccati_h_minus(int L, cplx x);

/// Irregular Riccati-Bessel y^_L(x) = x y_L(x) (y^_0 = -cos x). Upward
/// recurrence on the real axis, otherwise from j^ and the decaying Hankel
/// function.
inline Pair riccati_y(int L, cplx x) {
  if (x.imag() != 0.0) {
    const Pair j = riccati_j(L, x);
    const cplx mi(0.0, -1.0);
    if (x.imag() > 0.0) {
      const Pair h = riccati_h(L, x);
      return {(h.f - j.f) * mi, (h.df - j.df) * mi};
    }
    const Pair h = riccati_h_minus(L, x);
    return {(j.f - h.f) * mi, (j.df - h.df) * mi};
  }
  const cplx c = std::cos(x), s = std::sin(x);
  const Scaled y0(-c), y1(-c / x - s);
  auto [yL, yLm1] = detail::upward(L, x, y0, y1);
  Pair out{yL, {}};
  out.df = L == 0 ? Scaled(s) : yLm1 - yL * (static_cast<double>(L) / x);
  return out;
}

/// Outgoing Riccati-Hankel h^+_L = j^_L + i y^_L ~ (-i)^{L+1} e^{ix}.
/// Upward recurrence is stable for Im x >= 0 only; below the axis h^+ is
/// recovered from 2 j^ - h^-.
inline Pair riccati_h(int L, cplx x) {
  if (x.imag() < 0.0) {
    const Pair j = riccati_j(L, x), hm = riccati_h_minus(L, x);
    return {j.f * 2.0 - hm.f, j.df * 2.0 - hm.df};
  }
  const Scaled ex = Scaled::exp(cplx(0.0, 1.0) * x);
  const Scaled h0 = ex * cplx(0.0, -1.0);
  const Scaled h1 = ex * (cplx(-1.0, 0.0) - cplx(0.0, 1.0) / x);
  auto [hL, hLm1] = detail::upward(L, x, h0, h1);
  Pair out{hL, {}};
  out.df = L == 0 ? ex : hLm1 - hL * (static_cast<double>(L) / x);
  return out;
}

/// Incoming Riccati-Hankel h^-_L = j^_L - i y^_L, via h^-(x) = conj(h^+(conj x)).
inline Pair riccati_h_minus(int L, cplx x) {
  Pair p = riccati_h(L, std::conj(x));
  return {conj(p.f), conj(p.df)};
}

}  // namespace mzres::bessel

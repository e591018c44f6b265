#pragma once

#include <cmath>
#include <complex>

namespace mzres {

/// Complex number stored as mantissa * 2^exponent, so that products of
/// exponentially large and small Bessel values stay representable.
class Scaled {
 public:
  using cplx = std::complex<double>;

  Scaled() = default;
  Scaled(cplx m, long e = 0) : m_(m), e_(e) { normalize(); }

  /// Exact representation of exp(z).
  static Scaled exp(cplx z) {
    const double k = std::floor(z.real() / M_LN2);
    const double rest = z.real() - k * M_LN2;
    return Scaled(std::polar(std::exp(rest), z.imag()), static_cast<long>(k));
  }

  cplx mantissa() const { return m_; }
  long exponent() const { return e_; }
  bool is_zero() const { return m_ == cplx(0.0, 0.0); }

  /// log |value|.
  double log_abs() const {
    return is_zero() ? -INFINITY : std::log(std::abs(m_)) + e_ * M_LN2;
  }
  double arg() const { return std::arg(m_); }

  /// Plain complex value; overflows to inf or underflows to 0 if out of range.
  cplx value() const {
    return {std::ldexp(m_.real(), static_cast<int>(e_)),
            std::ldexp(m_.imag(), static_cast<int>(e_))};
  }

  friend Scaled operator*(const Scaled& a, const Scaled& b) {
    return Scaled(a.m_ * b.m_, a.e_ + b.e_);
  }
  friend Scaled operator*(const Scaled& a, cplx b) { return Scaled(a.m_ * b, a.e_); }
  friend Scaled operator*(cplx b, const Scaled& a) { return Scaled(a.m_ * b, a.e_); }
  friend Scaled operator/(const Scaled& a, const Scaled& b) {
    return Scaled(a.m_ / b.m_, a.e_ - b.e_);
  }
  friend Scaled operator/(const Scaled& a, cplx b) { return Scaled(a.m_ / b, a.e_); }
  friend Scaled operator+(const Scaled& a, const Scaled& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.e_ >= b.e_) return Scaled(a.m_ + shift(b.m_, b.e_ - a.e_), a.e_);
    return Scaled(b.m_ + shift(a.m_, a.e_ - b.e_), b.e_);
  }
  friend Scaled operator-(const Scaled& a) { return Scaled(-a.m_, a.e_); }
  friend Scaled conj(const Scaled& a) { return Scaled(std::conj(a.m_), a.e_); }
  friend Scaled operator-(const Scaled& a, const Scaled& b) { return a + (-b); }

  /// value(a) / value(b) as a plain complex number.
  friend cplx ratio(const Scaled& a, const Scaled& b) {
    return shift(a.m_ / b.m_, a.e_ - b.e_);
  }

 private:
  static cplx shift(cplx m, long de) {
    if (de < -2000) return 0.0;
    if (de > 2000) de = 2000;
    const int s = static_cast<int>(de);
    return {std::ldexp(m.real(), s), std::ldexp(m.imag(), s)};
  }

  void normalize() {
    const double a = std::max(std::abs(m_.real()), std::abs(m_.imag()));
    if (a == 0.0 || !std::isfinite(a)) {
      if (a == 0.0) e_ = 0;
      return;
    }
    const int k = std::ilogb(a);
    if (k > 64 || k < -64) {
      m_ = {std::ldexp(m_.real(), -k), std::ldexp(m_.imag(), -k)};
      e_ += k;
    }
  }

  cplx m_{0.0, 0.0};
  long e_ = 0;
};

}  // namespace mzres

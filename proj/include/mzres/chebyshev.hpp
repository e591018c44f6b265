#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace mzres {

/// Chebyshev series sum_k c_k T_k(x) on [-1, 1].
class ChebSeries {
 public:
  ChebSeries() = default;
  explicit ChebSeries(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

  /// Chebyshev points of the first kind, x_j = cos(pi (j + 1/2) / n),
  /// ordered from +1 towards -1.
  static std::vector<double> nodes(int n) {
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j) x[j] = std::cos(M_PI * (j + 0.5) / n);
    return x;
  }

  /// Interpolant through values sampled at nodes(n).
  static ChebSeries interpolate(std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    std::vector<double> c(n, 0.0);
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int j = 0; j < n; ++j)
        s += values[j] * std::cos(M_PI * k * (j + 0.5) / n);
      c[k] = (k == 0 ? 1.0 : 2.0) * s / n;
    }
    return ChebSeries(std::move(c));
  }

  double operator()(double x) const {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c_.size(); k-- > 1;) {
      const double b0 = 2.0 * x * b1 - b2 + c_[k];
      b2 = b1;
      b1 = b0;
    }
    return x * b1 - b2 + (c_.empty() ? 0.0 : c_[0]);
  }

  ChebSeries derivative() const {
    const std::size_t n = c_.size();
    if (n < 2) return ChebSeries({0.0});
    std::vector<double> d(n, 0.0);
    for (std::size_t k = n - 1; k-- > 0;) {
      d[k] = (k + 2 < n ? d[k + 2] : 0.0) + 2.0 * (k + 1) * c_[k + 1];
    }
    d[0] *= 0.5;
    d.pop_back();
    return ChebSeries(std::move(d));
  }

  /// Antiderivative vanishing at x = -1.
  ChebSeries integral() const {
    const std::size_t n = c_.size();
    std::vector<double> a(n + 1, 0.0);
    auto ck = [&](std::size_t k) { return k < n ? c_[k] : 0.0; };
    for (std::size_t k = 1; k <= n; ++k) {
      const double prev = (k == 1 ? 2.0 * ck(0) : ck(k - 1));
      a[k] = (prev - ck(k + 1)) / (2.0 * k);
    }
    ChebSeries out(a);
    out.c_[0] = -out(-1.0);
    return out;
  }

  const std::vector<double>& coeffs() const { return c_; }
  std::size_t size() const { return c_.size(); }

 private:
  std::vector<double> c_;
};

}  // namespace mzres

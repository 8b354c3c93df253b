#pragma once

// Reference values computed independently of the library's solvers.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

// u on 1 < r < 2 with u(1) = 1, u(2) = 0 for the 2-Laplacian.
inline double annulus_log(double r) { return std::log(2.0 / r) / std::log(2.0); }

// Same for the p-Laplacian, p ≠ 2: u = (2^β − r^β)/(2^β − 1), β = (p − 2)/(p − 1).
inline double annulus_power(double p, double r) {
  const double b = (p - 2.0) / (p - 1.0);
  return (std::pow(2.0, b) - std::pow(r, b)) / (std::pow(2.0, b) - 1.0);
}

inline double capacity_disk_in_double_disk() { return 2.0 * std::numbers::pi / std::log(2.0); }

// Inverse of an increasing function on [0, ∞) by bracketing and bisection.
inline double invert(const std::function<double(double)>& f, double y) {
  if (y <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) < y) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 400) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Radial solution on the annulus 1 < r < 2 for a spatially constant density
/// g: the flux r·g(|u'|) = c is constant, so |u'| = g⁻¹(c/r) and c is fixed by
/// ∫₁² g⁻¹(c/r) dr = 1.
class RadialAnnulus {
 public:
  explicit RadialAnnulus(std::function<double(double)> g) : g_(std::move(g)) {
    double lo = 0.0;
    double hi = 1.0;
    while (drop(1.0, hi) < 1.0) hi *= 2.0;
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      (drop(1.0, mid) < 1.0 ? lo : hi) = mid;
    }
    c_ = 0.5 * (lo + hi);
  }
  double operator()(double r) const { return drop(r, c_); }
  double flux() const { return c_; }

 private:
  double drop(double r, double c) const {
    return simpson([&](double s) { return invert(g_, c / s); }, r, 2.0, 200);
  }
  std::function<double(double)> g_;
  double c_ = 0.0;
};

// sup_t (s·t − G(t)) by golden-section search on a bracket found by doubling.
inline double legendre(const std::function<double(double)>& G, double s) {
  double hi = 1.0;
  while (s * hi - G(hi) > s * 0.5 * hi - G(0.5 * hi)) hi *= 2.0;
  double a = 0.0;
  double b = hi;
  const double k = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - k * (b - a);
  double d = a + k * (b - a);
  for (int i = 0; i < 300; ++i) {
    if (s * c - G(c) > s * d - G(d))
      b = d;
    else
      a = c;
    c = b - k * (b - a);
    d = a + k * (b - a);
  }
  const double t = 0.5 * (a + b);
  return s * t - G(t);
}

}  // namespace oracle

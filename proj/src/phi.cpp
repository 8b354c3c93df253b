#include "orlicz/phi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "orlicz/errors.hpp"
#include "orlicz/format.hpp"

namespace orlicz {

namespace {

constexpr double kE = std::numbers::e;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// sup_t t / ((e + t) log(e + t)): the excess of t g/G over p for the log families.
double log_excess_sup() {
  static const double value = [] {
    auto f = [](double t) { return t / ((kE + t) * std::log(kE + t)); };
    // Unimodal on (0, ∞); golden-section on log t.
    double lo = std::log(1e-3);
    double hi = std::log(1e3);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - ratio * (hi - lo);
    double b = lo + ratio * (hi - lo);
    for (int it = 0; it < 200; ++it) {
      if (f(std::exp(a)) > f(std::exp(b))) {
        hi = b;
      } else {
        lo = a;
      }
      a = hi - ratio * (hi - lo);
      b = lo + ratio * (hi - lo);
    }
    return f(std::exp(0.5 * (lo + hi)));
  }();
  return value;
}

void require_exponent(double p, const char* what) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError(std::string(what) + " must be finite and > 1");
}

}  // namespace

// --- CoefficientField -------------------------------------------------------

CoefficientField CoefficientField::constant(double c) {
  if (!std::isfinite(c)) throw DomainError("constant coefficient must be finite");
  return {Kind::constant, c, 0.0, 0.0, 0.0};
}

CoefficientField CoefficientField::step(double left, double right, double width, double at) {
  if (!std::isfinite(left) || !std::isfinite(right) || !std::isfinite(at) || !(width >= 0.0))
    throw DomainError("step coefficient needs finite values and width >= 0");
  return {Kind::step, left, right, width, at};
}

CoefficientField CoefficientField::positive_power(double alpha, double scale, double at) {
  if (!(alpha > 0.0) || !std::isfinite(alpha) || !(scale >= 0.0) || !std::isfinite(at))
    throw DomainError("positive-part power needs alpha > 0 and scale >= 0");
  return {Kind::positive_power, alpha, scale, at, 0.0};
}

double CoefficientField::operator()(Point p) const {
  switch (kind_) {
    case Kind::constant:
      return a_;
    case Kind::step: {
      const double s = p.x - d_;
      if (c_ == 0.0) return s < 0.0 ? a_ : b_;
      const double lam = std::clamp(s / c_ + 0.5, 0.0, 1.0);
      return (1.0 - lam) * a_ + lam * b_;
    }
    case Kind::positive_power:
      return b_ * std::pow(std::max(0.0, p.x - c_), a_);
  }
  return 0.0;
}

// Every field depends on x₁ only and is monotone in it.
double CoefficientField::min_over(const Box& box) const {
  return std::min((*this)({box.x0, box.y0}), (*this)({box.x1, box.y0}));
}

double CoefficientField::max_over(const Box& box) const {
  return std::max((*this)({box.x0, box.y0}), (*this)({box.x1, box.y0}));
}

std::string CoefficientField::spec() const {
  switch (kind_) {
    case Kind::constant:
      return "const(" + format_number(a_) + ")";
    case Kind::step:
      return "step(" + format_number(a_) + ", " + format_number(b_) + ", " + format_number(c_) + ", " +
             format_number(d_) + ")";
    case Kind::positive_power:
      return "pos_power(" + format_number(a_) + ", " + format_number(b_) + ", " + format_number(c_) + ")";
  }
  return {};
}

// --- PhiFunction ------------------------------------------------------------

PhiFunction PhiFunction::power(double p, Box box) {
  require_exponent(p, "power exponent");
  return PhiFunction(PowerFamily{p}, box);
}

PhiFunction PhiFunction::variable_exponent(CoefficientField p, Box box) {
  return PhiFunction(VariableExponentFamily{std::move(p)}, box);
}

PhiFunction PhiFunction::double_phase(double p, double q, CoefficientField a, Box box) {
  return PhiFunction(DoublePhaseFamily{p, q, std::move(a)}, box);
}

PhiFunction PhiFunction::orlicz_log(double p, Box box) {
  require_exponent(p, "log-perturbed exponent");
  return PhiFunction(OrliczLogFamily{p}, box);
}

PhiFunction PhiFunction::power_log(CoefficientField p, Box box) {
  return PhiFunction(PowerLogFamily{std::move(p)}, box);
}

PhiFunction PhiFunction::with_box(Box box) const { return PhiFunction(family_, box); }

PhiFunction::PhiFunction(PhiFamily family, Box box) : family_(std::move(family)), box_(box) {
  if (!(box_.x1 > box_.x0) || !(box_.y1 > box_.y0)) throw GeometryError("Φ-function box is empty");
  std::visit(overloaded{
                 [&](const PowerFamily& f) {
                   sc_ = {f.p, f.p};
                   c0_ = 1.0;
                 },
                 [&](const VariableExponentFamily& f) {
                   const double lo = f.p.min_over(box_);
                   const double hi = f.p.max_over(box_);
                   require_exponent(lo, "variable exponent minimum");
                   sc_ = {lo, hi};
                   c0_ = 1.0;
                 },
                 [&](const DoublePhaseFamily& f) {
                   require_exponent(f.p, "double-phase p");
                   if (!(f.q >= f.p) || !std::isfinite(f.q)) throw DomainError("double-phase needs q >= p");
                   const double amin = f.a.min_over(box_);
                   const double amax = f.a.max_over(box_);
                   if (amin < 0.0) throw DomainError("double-phase weight a(x) must be nonnegative");
                   sc_ = {f.p, amax > 0.0 ? f.q : f.p};
                   c0_ = std::max(1.0 + amax, 1.0 / (1.0 + amin));
                 },
                 [&](const OrliczLogFamily& f) {
                   sc_ = {f.p, f.p + log_excess_sup()};
                   c0_ = std::log(kE + 1.0);
                 },
                 [&](const PowerLogFamily& f) {
                   const double lo = f.p.min_over(box_);
                   const double hi = f.p.max_over(box_);
                   require_exponent(lo, "power-log exponent minimum");
                   sc_ = {lo, hi + log_excess_sup()};
                   c0_ = std::log(kE + 1.0);
                 },
             },
             family_);
}

double PhiFunction::G(Point x, double t) const {
  return std::visit(overloaded{
                        [&](const PowerFamily& f) { return std::pow(t, f.p); },
                        [&](const VariableExponentFamily& f) { return std::pow(t, f.p(x)); },
                        [&](const DoublePhaseFamily& f) { return std::pow(t, f.p) + f.a(x) * std::pow(t, f.q); },
                        [&](const OrliczLogFamily& f) { return std::pow(t, f.p) * std::log(kE + t); },
                        [&](const PowerLogFamily& f) { return std::pow(t, f.p(x)) * std::log(kE + t); },
                    },
                    family_);
}

double PhiFunction::g(Point x, double t) const {
  auto log_g = [t](double p) {
    const double tp1 = std::pow(t, p - 1.0);
    return p * tp1 * std::log(kE + t) + tp1 * t / (kE + t);
  };
  return std::visit(overloaded{
                        [&](const PowerFamily& f) { return f.p * std::pow(t, f.p - 1.0); },
                        [&](const VariableExponentFamily& f) {
                          const double p = f.p(x);
                          return p * std::pow(t, p - 1.0);
                        },
                        [&](const DoublePhaseFamily& f) {
                          return f.p * std::pow(t, f.p - 1.0) + f.a(x) * f.q * std::pow(t, f.q - 1.0);
                        },
                        [&](const OrliczLogFamily& f) { return log_g(f.p); },
                        [&](const PowerLogFamily& f) { return log_g(f.p(x)); },
                    },
                    family_);
}

double PhiFunction::dg(Point x, double t) const {
  auto pow_d = [t](double p) { return p * (p - 1.0) * std::pow(t, p - 2.0); };
  auto log_d = [t](double p) {
    const double et = kE + t;
    return p * (p - 1.0) * std::pow(t, p - 2.0) * std::log(et) + 2.0 * p * std::pow(t, p - 1.0) / et -
           std::pow(t, p) / (et * et);
  };
  return std::visit(overloaded{
                        [&](const PowerFamily& f) { return pow_d(f.p); },
                        [&](const VariableExponentFamily& f) { return pow_d(f.p(x)); },
                        [&](const DoublePhaseFamily& f) { return pow_d(f.p) + f.a(x) * pow_d(f.q); },
                        [&](const OrliczLogFamily& f) { return log_d(f.p); },
                        [&](const PowerLogFamily& f) { return log_d(f.p(x)); },
                    },
                    family_);
}

double PhiFunction::g_inverse(Point x, double s) const {
  if (s <= 0.0) return 0.0;
  auto closed = [s](double p) { return std::pow(s / p, 1.0 / (p - 1.0)); };
  if (const auto* f = std::get_if<PowerFamily>(&family_)) return closed(f->p);
  if (const auto* f = std::get_if<VariableExponentFamily>(&family_)) return closed(f->p(x));

  // Generalized inverse sup{t ≥ 0 : g(x,t) ≤ s} by bisection on the monotone g.
  double lo = 0.0;
  double hi = 1.0;
  while (g(x, hi) <= s) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 4000 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(x, mid) <= s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double PhiFunction::conjugate(Point x, double s) const {
  if (s <= 0.0) return 0.0;
  if (const auto* f = std::get_if<PowerFamily>(&family_)) {
    const double p = f->p;
    return (p - 1.0) * std::pow(s / p, p / (p - 1.0));
  }
  // Equality case of Young's inequality at t = g⁻¹(x, s).
  const double t = g_inverse(x, s);
  return s * t - G(x, t);
}

bool PhiFunction::is_spatially_constant() const {
  return std::visit(overloaded{
                        [](const PowerFamily&) { return true; },
                        [](const VariableExponentFamily& f) { return f.p.is_constant(); },
                        [](const DoublePhaseFamily& f) { return f.a.is_constant(); },
                        [](const OrliczLogFamily&) { return true; },
                        [](const PowerLogFamily& f) { return f.p.is_constant(); },
                    },
                    family_);
}

bool PhiFunction::is_homogeneous() const { return std::holds_alternative<PowerFamily>(family_); }

std::string PhiFunction::spec() const {
  return std::visit(overloaded{
                        [](const PowerFamily& f) { return "power(" + format_number(f.p) + ")"; },
                        [](const VariableExponentFamily& f) { return "variable_exponent(" + f.p.spec() + ")"; },
                        [](const DoublePhaseFamily& f) {
                          return "double_phase(" + format_number(f.p) + ", " + format_number(f.q) + ", " +
                                 f.a.spec() + ")";
                        },
                        [](const OrliczLogFamily& f) { return "orlicz_log(" + format_number(f.p) + ")"; },
                        [](const PowerLogFamily& f) { return "power_log(" + f.p.spec() + ")"; },
                    },
                    family_);
}

// --- checked evaluation -----------------------------------------------------

namespace {

void check_point(const PhiFunction& phi, Point x) {
  if (!phi.box().contains(x, 1e-12 * (1.0 + phi.box().diagonal())))
    throw GeometryError("point (" + format_number(x.x) + ", " + format_number(x.y) +
                        ") lies outside the Φ-function box");
}

void check_arg(double t, const char* name) {
  if (!std::isfinite(t)) throw DomainError(std::string(name) + " must be finite");
  if (t < 0.0) throw DomainError(std::string(name) + " must be nonnegative");
}

}  // namespace

double eval_G(const PhiFunction& phi, Point x, double t) {
  check_arg(t, "t");
  check_point(phi, x);
  return phi.G(x, t);
}

double eval_g(const PhiFunction& phi, Point x, double t) {
  check_arg(t, "t");
  check_point(phi, x);
  return phi.g(x, t);
}

double eval_g_inverse(const PhiFunction& phi, Point x, double s) {
  check_arg(s, "s");
  check_point(phi, x);
  return phi.g_inverse(x, s);
}

double eval_conjugate(const PhiFunction& phi, Point x, double s) {
  check_arg(s, "s");
  check_point(phi, x);
  return phi.conjugate(x, s);
}

// --- sampling certification -------------------------------------------------

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 1 || hi <= lo) {
    out.push_back(lo);
    if (hi > lo) out.push_back(hi);
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(std::exp(a + (b - a) * i / (n - 1)));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> lin_grid(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 1) {
    out.push_back(0.5 * (lo + hi));
    return out;
  }
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

std::vector<Point> ball_samples(Point c, double radius, int ring_points) {
  std::vector<Point> pts{c, {c.x + 0.999 * radius, c.y}, {c.x - 0.999 * radius, c.y}};
  for (double frac : {0.5, 0.999}) {
    for (int k = 0; k < ring_points; ++k) {
      const double th = 2.0 * std::numbers::pi * (k + 0.5) / ring_points;
      pts.push_back({c.x + frac * radius * std::cos(th), c.y + frac * radius * std::sin(th)});
    }
  }
  return pts;
}

double ratio_sup(const PhiFunction& phi, std::span<const Point> pts, std::span<const double> ts) {
  double sup = 1.0;
  for (double t : ts) {
    double gmax = 0.0;
    double gmin = std::numeric_limits<double>::infinity();
    for (Point x : pts) {
      const double v = phi.G(x, t);
      gmax = std::max(gmax, v);
      gmin = std::min(gmin, v);
    }
    if (gmin > 0.0) sup = std::max(sup, gmax / gmin);
  }
  return sup;
}

// Smallest t with min over pts of G(x,t) ≥ level.
double invert_lower_envelope(const PhiFunction& phi, std::span<const Point> pts, double level) {
  auto env = [&](double t) {
    double m = std::numeric_limits<double>::infinity();
    for (Point x : pts) m = std::min(m, phi.G(x, t));
    return m;
  };
  double lo = std::log(1e-12);
  double hi = std::log(1e12);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (env(std::exp(mid)) >= level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::exp(hi);
}

}  // namespace

ScEstimate estimate_sc_constants(const PhiFunction& phi, const Box& box, const SamplingSpec& samples) {
  if (samples.t_points < 2 || samples.x_points < 1 || !(samples.t_min > 0.0) || !(samples.t_max > samples.t_min))
    throw ConfigError("sampling spec needs t_min > 0, t_max > t_min and at least two t samples");
  const auto ts = log_grid(samples.t_min, samples.t_max, samples.t_points);
  const auto xs = lin_grid(box.x0, box.x1, samples.x_points);
  const auto ys = lin_grid(box.y0, box.y1, samples.x_points);
  ScEstimate est{std::numeric_limits<double>::infinity(), 0.0, false};
  for (double px : xs) {
    for (double py : ys) {
      const Point x{px, py};
      for (double t : ts) {
        const double G = phi.G(x, t);
        if (!(G > 0.0)) continue;
        const double r = t * phi.g(x, t) / G;
        est.lower = std::min(est.lower, r);
        est.upper = std::max(est.upper, r);
        if (r <= 1.0) est.violation = true;
      }
    }
  }
  return est;
}

const ConditionVerdict& ConditionReport::verdict(const std::string& condition) const {
  for (const auto& v : verdicts)
    if (v.condition == condition) return v;
  throw std::out_of_range("no verdict for condition " + condition);
}

ConditionReport check_conditions(const PhiFunction& phi, const Box& box, std::span<const double> radii,
                                 const ConditionOptions& options) {
  if (radii.empty()) throw ConfigError("condition check needs at least one radius");
  for (double R : radii)
    if (!(R > 0.0) || R > 1.0) throw DomainError("condition radii must lie in (0, 1]");

  ConditionReport report;
  report.options = options;

  // (A0): 1/c₀ ≤ G(x,1) ≤ c₀ over a grid of the box.
  {
    double gmax = 0.0;
    double gmin = std::numeric_limits<double>::infinity();
    for (double px : lin_grid(box.x0, box.x1, options.centers_per_axis)) {
      for (double py : lin_grid(box.y0, box.y1, options.centers_per_axis)) {
        const double v = phi.G({px, py}, 1.0);
        gmax = std::max(gmax, v);
        gmin = std::min(gmin, v);
      }
    }
    const double c0 = std::max(gmax, 1.0 / gmin);
    report.verdicts.push_back({"A0", "t=1", c0, options.c_max, std::isfinite(c0) && c0 <= options.c_max});
  }

  double sup_a1 = 1.0;
  double sup_a1n = 1.0;
  double sup_lemma = 1.0;
  for (double R : radii) {
    if (box.x1 - box.x0 < 2.0 * R || box.y1 - box.y0 < 2.0 * R) continue;
    const auto cx = lin_grid(box.x0 + R, box.x1 - R, options.centers_per_axis);
    const auto cy = lin_grid(box.y0 + R, box.y1 - R, options.centers_per_axis);
    double row_a1 = 1.0;
    double row_a1n = 1.0;
    double row_lemma = 1.0;
    double a1_lo = std::numeric_limits<double>::infinity();
    double a1_hi = 0.0;
    for (double px : cx) {
      for (double py : cy) {
        const auto pts = ball_samples({px, py}, R, options.ring_points);
        ++report.balls_sampled;
        const auto tn = log_grid(1.0, 1.0 / R, options.t_points);
        row_a1n = std::max(row_a1n, ratio_sup(phi, pts, tn));
        const auto tl = log_grid(options.lemma_r, options.lemma_s / R, options.t_points);
        row_lemma = std::max(row_lemma, ratio_sup(phi, pts, tl));
        // (A1) window: G⁻_B(t) ∈ [1, R^{-n}].
        const double lo = invert_lower_envelope(phi, pts, 1.0);
        const double hi = invert_lower_envelope(phi, pts, std::pow(R, -kDim));
        a1_lo = std::min(a1_lo, lo);
        a1_hi = std::max(a1_hi, hi);
        const auto t1 = log_grid(lo, std::max(lo, hi), options.t_points);
        row_a1 = std::max(row_a1, ratio_sup(phi, pts, t1));
      }
    }
    report.rows.push_back({"A1", R, a1_lo, a1_hi, row_a1});
    report.rows.push_back({"A1n", R, 1.0, 1.0 / R, row_a1n});
    report.rows.push_back({"A1n_flexible", R, options.lemma_r, options.lemma_s / R, row_lemma});
    sup_a1 = std::max(sup_a1, row_a1);
    sup_a1n = std::max(sup_a1n, row_a1n);
    sup_lemma = std::max(sup_lemma, row_lemma);
  }
  if (report.balls_sampled == 0) throw ConfigError("no ball of the requested radii fits inside the box");

  report.verdicts.push_back({"A1", "G-_B(t) in [1, R^-n]", sup_a1, options.c_max, sup_a1 <= options.c_max});
  report.verdicts.push_back({"A1n", "t in [1, 1/R]", sup_a1n, options.c_max, sup_a1n <= options.c_max});
  report.verdicts.push_back({"A1n_flexible",
                             "t in [" + format_number(options.lemma_r) + ", " + format_number(options.lemma_s) + "/R]",
                             sup_lemma, options.c_max, sup_lemma <= options.c_max});
  return report;
}

}  // namespace orlicz

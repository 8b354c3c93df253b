#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "orlicz/point.hpp"

namespace orlicz {

/// Closed-form scalar field over the plane, used for the spatial parameters of
/// a Φ-family (the exponent p(x) or the double-phase weight a(x)).
///
/// Only three shapes are supported: a constant, a step across the vertical
/// line x₁ = at with a linear ramp of the given width, and scale·max(0, x₁ − at)^α.
class CoefficientField {
 public:
  enum class Kind { constant, step, positive_power };

  static CoefficientField constant(double c);
  static CoefficientField step(double left, double right, double width, double at = 0.0);
  static CoefficientField positive_power(double alpha, double scale = 1.0, double at = 0.0);

  double operator()(Point p) const;
  double min_over(const Box& box) const;
  double max_over(const Box& box) const;

  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::constant; }
  std::string spec() const;

  friend bool operator==(const CoefficientField&, const CoefficientField&) = default;

 private:
  CoefficientField(Kind kind, double a, double b, double c, double d)
      : kind_(kind), a_(a), b_(b), c_(c), d_(d) {}

  Kind kind_;
  double a_;
  double b_;
  double c_;
  double d_;
};

struct PowerFamily {
  double p;
};
struct VariableExponentFamily {
  CoefficientField p;
};
struct DoublePhaseFamily {
  double p;
  double q;
  CoefficientField a;
};
// G(t) = t^p log(e + t), no spatial dependence.
struct OrliczLogFamily {
  double p;
};
// G(x, t) = t^{p(x)} log(e + t).
struct PowerLogFamily {
  CoefficientField p;
};

using PhiFamily =
    std::variant<PowerFamily, VariableExponentFamily, DoublePhaseFamily, OrliczLogFamily, PowerLogFamily>;

// The (SC) pair g₀ ≤ t g(x,t)/G(x,t) ≤ g⁰.
struct ScConstants {
  double lower;
  double upper;
};

inline constexpr Box kDefaultPhiBox{-4.0, -4.0, 4.0, 4.0};

/// A generalized Φ-function G(x, t) from one of the built-in families.
///
/// The member functions G, g, dg, g_inverse and conjugate are the unchecked
/// fast path used by the solvers; the free functions eval_G etc. validate
/// their arguments first. Construction certifies the (SC) and (A0) constants
/// over the attached box from the closed forms.
class PhiFunction {
 public:
  static PhiFunction power(double p, Box box = kDefaultPhiBox);
  static PhiFunction variable_exponent(CoefficientField p, Box box = kDefaultPhiBox);
  static PhiFunction double_phase(double p, double q, CoefficientField a, Box box = kDefaultPhiBox);
  static PhiFunction orlicz_log(double p, Box box = kDefaultPhiBox);
  static PhiFunction power_log(CoefficientField p, Box box = kDefaultPhiBox);

  double G(Point x, double t) const;
  double g(Point x, double t) const;
  // Derivative of g in t; drives the solver's second-order metric.
  double dg(Point x, double t) const;
  double g_inverse(Point x, double s) const;
  double conjugate(Point x, double s) const;

  const PhiFamily& family() const { return family_; }
  const Box& box() const { return box_; }
  ScConstants sc_constants() const { return sc_; }
  // Smallest c with 1/c ≤ G(x,1) ≤ c on the box; (A0) holds with any c₀ > max(this, 1).
  double a0_constant() const { return c0_; }
  bool is_spatially_constant() const;
  // True for Power: the solution operator commutes with positive scaling of the data.
  bool is_homogeneous() const;
  std::string spec() const;

  PhiFunction with_box(Box box) const;

 private:
  PhiFunction(PhiFamily family, Box box);

  PhiFamily family_;
  Box box_;
  ScConstants sc_{};
  double c0_ = 1.0;
};

// Checked evaluation: negative or non-finite t → DomainError; x outside the
// Φ-function's box → GeometryError.
double eval_G(const PhiFunction& phi, Point x, double t);
double eval_g(const PhiFunction& phi, Point x, double t);
double eval_g_inverse(const PhiFunction& phi, Point x, double s);
double eval_conjugate(const PhiFunction& phi, Point x, double s);

// Sampling density for (SC) estimation. t runs over a log grid (the default
// spans 16 decades starting at 1e-8; t = 0 is excluded since the ratio is 0/0).
struct SamplingSpec {
  double t_min = 1e-8;
  double t_max = 1e8;
  int t_points = 161;
  int x_points = 9;
};

struct ScEstimate {
  double lower;
  double upper;
  bool violation;  // some sampled ratio was ≤ 1
};

ScEstimate estimate_sc_constants(const PhiFunction& phi, const Box& box, const SamplingSpec& samples = {});

struct ConditionOptions {
  double c_max = 10.0;        // a condition holds numerically iff every sampled sup ratio ≤ c_max
  int centers_per_axis = 21;  // ball centers per axis (odd keeps the box midline in the sample)
  int ring_points = 8;        // points per sampling ring inside each ball
  int t_points = 33;          // log-spaced t samples per window
  double lemma_r = 0.5;       // flexible (A1,n) window [r, s/R]
  double lemma_s = 2.0;
};

// One (condition, R) sample: sup over sampled balls B_R, x, y ∈ B_R and t in
// the window of G(x,t)/G(y,t).
struct ConditionRow {
  std::string condition;
  double radius;
  double t_lo;
  double t_hi;
  double sup_ratio;
};

struct ConditionVerdict {
  std::string condition;
  std::string window;
  double sup_ratio;
  double threshold;
  bool holds;
};

struct ConditionReport {
  std::vector<ConditionVerdict> verdicts;
  std::vector<ConditionRow> rows;
  ConditionOptions options;
  int balls_sampled = 0;

  const ConditionVerdict& verdict(const std::string& condition) const;
};

ConditionReport check_conditions(const PhiFunction& phi, const Box& box, std::span<const double> radii,
                                 const ConditionOptions& options = {});

}  // namespace orlicz

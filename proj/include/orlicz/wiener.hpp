#pragma once

#include <span>
#include <string>
#include <vector>

#include "orlicz/geometry.hpp"
#include "orlicz/phi.hpp"
#include "orlicz/solver.hpp"

namespace orlicz {

struct WienerOptions {
  int nodes_per_radius = 64;  // mesh step h = t / nodes_per_radius at scale t
  // Subtract the capacity of the single node at x₀ when points are polar
  // (g⁰ ≤ n). With h ∝ t a lone node has scale-invariant capacity, which
  // would otherwise make a puncture look like a set of positive density.
  bool subtract_point_floor = true;
  SolveOptions solve{};
};

struct WienerSample {
  double t = 0.0;
  double h = 0.0;
  double cap_raw = 0.0;    // cap(B̄(x₀,t) ∩ Ωᶜ; B(x₀,2t)) on the mesh
  double cap_floor = 0.0;  // cap({x₀}; B(x₀,2t)) on the same mesh, 0 if not subtracted
  double cap = 0.0;        // max(0, cap_raw − cap_floor)
  double W = 0.0;          // g⁻¹(x₀, cap / t^{n−1})
  int complement_nodes = 0;
  bool converged = true;
};

// Capacity and integrand at one scale; an empty complement gives (0, 0).
WienerSample wiener_integrand(const PhiFunction& phi, const Domain& domain, Point x0, double t,
                              const WienerOptions& opts = {});

enum class Regularity { regular, irregular, inconclusive };
const char* to_string(Regularity r);

struct ClassifierThresholds {
  double slope_fraction = 0.05;  // slope threshold = slope_fraction · median W(t_j)·t_j
  double floor_fraction = 0.25;  // W·t over the tail must stay above floor_fraction · median
  double tail_ratio = 0.25;      // increments shrinking by this factor per scale → convergent
  int tail_scales = 4;
  int min_scales = 6;
};

struct Classification {
  Regularity regularity = Regularity::inconclusive;
  double slope = 0.0;
  double slope_threshold = 0.0;
  std::vector<std::string> warnings;
};

/// Finite-scale reading of the Wiener sum: regular when the partial sums keep
/// growing linearly in ln(1/t) with W·t bounded below, irregular when the tail
/// increments decay geometrically, inconclusive otherwise.
Classification classify_regularity(std::span<const double> radii, std::span<const double> integrand,
                                   const ClassifierThresholds& thresholds = {});

struct WienerReport {
  Point x0;
  double rho = 0.0;
  std::vector<WienerSample> samples;  // t_j = 4^{−j} ρ
  std::vector<double> radii;
  std::vector<double> cap_values;
  std::vector<double> integrand;
  std::vector<double> increments;     // W(t_j)(t_{j−1} − t_j), 0 for j = 0
  std::vector<double> partial_sums;
  double slope = 0.0;
  double slope_threshold = 0.0;
  Regularity classification = Regularity::inconclusive;
  ClassifierThresholds thresholds;
  bool truncated = false;
  std::vector<std::string> warnings;
};

WienerReport wiener_integral(const PhiFunction& phi, const Domain& domain, Point x0, double rho, int j_max,
                             const WienerOptions& opts = {}, const ClassifierThresholds& thresholds = {});

Classification classify_regularity(const WienerReport& report);

struct DensityRow {
  double r = 0.0;
  double cap_complement = 0.0;  // floor-corrected as in wiener_integrand
  double cap_ball = 0.0;        // cap(B̄(x₀,r); B(x₀,2r))
  double ratio = 0.0;
};

struct ExteriorSphereReport {
  bool on_boundary = false;
  bool has_exterior_ball = false;
  Point normal{0.0, 0.0};
  double ball_radius = 0.0;  // largest tested radius of a tangent exterior ball
  std::vector<DensityRow> rows;
  double min_ratio = 0.0;
  double ratio_floor = 0.05;
  // has_exterior_ball ⇒ min_ratio ≥ ratio_floor
  bool consistent = true;
};

ExteriorSphereReport exterior_sphere_check(const PhiFunction& phi, const Domain& domain, Point x0,
                                           std::span<const double> scales, const WienerOptions& opts = {});

}  // namespace orlicz

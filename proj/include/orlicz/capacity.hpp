#pragma once

#include <span>
#include <string>
#include <vector>

#include "orlicz/geometry.hpp"
#include "orlicz/phi.hpp"
#include "orlicz/solver.hpp"

namespace orlicz {

/// Relative capacity cap(K; Ω) on a mesh of Ω together with its capacitary
/// function (1 on K, 0 on the rest of the constrained nodes).
struct CapacityResult {
  double value = 0.0;
  Field minimizer;
  NodeSet K_nodes;
  std::string omega_spec;
  double mesh_h = 0.0;
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = true;
};

/// Energy of the solve with data 1 on K and 0 on every other constrained node.
/// K = ∅ gives value 0 and a zero minimizer. Throws GeometryError if K meets
/// the outer Dirichlet boundary or an excluded node.
CapacityResult relative_capacity(const Mesh& mesh, const PhiFunction& phi, const NodeSet& K,
                                 const SolveOptions& opts = {}, std::string omega_spec = {});

// Active nodes inside the closed set {sdf ≤ 0}, up to 1e-9·h.
NodeSet nodes_in(const Mesh& mesh, const Shape& set);

/// cap(B̄(x₀,r); B(x₀,σr)) on a ball mesh with step r / nodes_per_radius.
CapacityResult ball_capacity(const PhiFunction& phi, Point x0, double r, double sigma, int nodes_per_radius = 32,
                             const SolveOptions& opts = {});

struct CapacityBounds {
  double lower = 0.0;  // |B|·inf_{σB} G(·, 1/r)
  double upper = 0.0;  // |B|·sup_{σB} G(·, 1/r)
};

/// Two-sided ball capacity comparison |B|·G∓_{σB}(1/r). The extremes of
/// G(·,1/r) are sampled on the grid of step h over σB (h = 0 picks r/16).
/// Throws DomainError for r ≤ 0 or σ ≤ 1, GeometryError if σB leaves the
/// Φ-function's box.
CapacityBounds ball_capacity_bounds(const PhiFunction& phi, Point x0, double r, double sigma, double h = 0.0);

// --- audits -----------------------------------------------------------------

struct CapacityCase {
  std::string label;
  Mesh mesh;
  NodeSet K;
};

// Expected order cap(lesser) ≤ cap(greater): lesser = (K; Ω), greater = (K′; Ω′)
// with K ⊂ K′ and Ω′ ⊂ Ω, both meshes on the same grid.
struct NestedPair {
  CapacityCase lesser;
  CapacityCase greater;
};

struct InclusionRow {
  std::string label;
  double cap_lesser = 0.0;
  double cap_greater = 0.0;
  double slack = 0.0;
  bool holds = false;
};

// K compact inside B(x₀,r) and r ≤ s ≤ 2r.
struct DilationScenario {
  std::string label;
  Shape K;
  Point x0;
  double r;
  double s;
};

struct DilationRow {
  std::string label;
  double h = 0.0;
  double cap_2s = 0.0;
  double cap_2r = 0.0;
  double cap_4r = 0.0;
  double c_stated = 0.0;  // cap(K;B_2r) / (cap(K;B_2s) + s^n)
  double c_4r = 0.0;      // cap(K;B_2r) / (cap(K;B_4r) + r^n), the form used in the proof
  bool ordered = false;   // cap(K;B_2s) ≤ cap(K;B_2r) + slack
};

struct MonotonicityReport {
  std::vector<InclusionRow> inclusions;
  std::vector<DilationRow> dilations;  // at h, then at h/2
  double c_stated = 0.0;               // max over scenarios at h
  double c_stated_refined = 0.0;       // max over scenarios at h/2
  double c_4r = 0.0;
  double c_4r_refined = 0.0;
  bool inclusions_hold = true;
  bool refinement_bounded = true;      // refined constants within a factor 2 of the coarse ones
};

/// Checks monotonicity under inclusion for each pair (ConfigError if a pair is
/// not nested) and extracts the dilation constants at steps h and h/2.
MonotonicityReport capacity_monotonicity_audit(const PhiFunction& phi, std::span<const NestedPair> pairs,
                                               std::span<const DilationScenario> dilations, double h,
                                               const SolveOptions& opts = {});

}  // namespace orlicz

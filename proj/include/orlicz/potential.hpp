#pragma once

#include <span>
#include <vector>

#include "orlicz/geometry.hpp"
#include "orlicz/phi.hpp"
#include "orlicz/solver.hpp"
#include "orlicz/wiener.hpp"

namespace orlicz {

/// Nodal representation of the Riesz measure of a supersolution: the weight
/// of node i is the residual paired with its hat function.
struct NodalMeasure {
  std::vector<double> weights;  // every node; excluded nodes carry 0
  double total = 0.0;           // Σ weights over nodes off the outer Dirichlet boundary
  double boundary_flux = 0.0;   // Σ weights over outer Dirichlet boundary nodes (= −total)
  double min_weight = 0.0;      // over nodes off the outer boundary
  NodeSet negative_nodes;       // off-boundary nodes with weight < −negativity_tol
};

NodalMeasure riesz_measure(const Mesh& mesh, const PhiFunction& phi, std::span<const double> u,
                           double negativity_tol = 1e-7);

// μ of a node set grown by its edge neighbors (outer boundary nodes left out).
double measure_near(const Mesh& mesh, const NodalMeasure& mu, const NodeSet& nodes);

// μ(B(x₀,ρ)): weights of off-boundary nodes within ρ of x₀.
double measure_of_ball(const Mesh& mesh, const NodalMeasure& mu, Point x0, double rho);

/// Capacitary potential of K in the mesh's ambient set: harmonic off K, 1 on
/// K, 0 on the outer boundary.
struct PotentialResult {
  Mesh mesh;
  Field field;
  NodeSet K_nodes;
  NodalMeasure measure;
  double capacity_value = 0.0;  // energy of the potential
  double measure_K = 0.0;       // μ(K) from measure_near
  double ratio = 0.0;           // μ(K)/cap, NaN when K = ∅
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = true;
};

PotentialResult g_potential(const Mesh& mesh, const PhiFunction& phi, const NodeSet& K, const SolveOptions& opts = {});

// μ(K)/cap(K;B). Throws DomainError when the capacity vanishes.
double measure_capacity_ratio(const PotentialResult& result);

/// Potential of B̄(x₀,r) ∖ Ω with respect to B(x₀,4r) at step h.
PotentialResult boundary_potential(const PhiFunction& phi, const Domain& domain, Point x0, double r, double h,
                                   const SolveOptions& opts = {});

struct DecayRow {
  double rho = 0.0;
  double sup_one_minus_u = 0.0;   // over B(x₀,ρ) ∩ Ω
  double log_ratio = 0.0;         // ln(1 / sup(1 − u))
  double partial_integral = 0.0;  // ∫_ρ^r W(t) dt
  double c_fit = 0.0;             // log_ratio / partial_integral, NaN on the empty interval
  double measure_ball = 0.0;      // μ(B(x₀,ρ))
  double lemma_lhs = 0.0;         // ρ · g⁻¹(x₀, μ(B(x₀,ρ)) / ρ^{n−1})
  double lemma_rhs = 0.0;         // inf_{B(x₀,ρ)} u + ρ
  double lemma_c = 0.0;           // lemma_rhs / lemma_lhs, the largest admissible constant
};

struct DecayTable {
  double r = 0.0;
  std::vector<DecayRow> rows;
  std::vector<WienerSample> integrand;  // samples on {r} ∪ radii
  bool monotone = true;                 // sup(1 − u) nonincreasing as ρ decreases
};

/// Decay of 1 − u toward x₀ for u = boundary_potential(…, r, …), next to the
/// Wiener partial integrals over [ρ, r]. The integrand is sampled on {r} ∪ radii
/// and integrated with the trapezoid rule in ln t, which is exact for W ∝ 1/t.
/// Throws DomainError unless every radius lies in (0, r].
DecayTable potential_decay_profile(const PotentialResult& result, const PhiFunction& phi, const Domain& domain,
                                   Point x0, std::span<const double> radii, double r,
                                   const WienerOptions& wiener = {});

}  // namespace orlicz

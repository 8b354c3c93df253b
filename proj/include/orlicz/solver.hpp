#pragma once

#include <memory>
#include <span>
#include <vector>

#include "orlicz/geometry.hpp"
#include "orlicz/phi.hpp"

namespace orlicz {

/// Descent metric used to precondition the energy gradient.
///
/// `newton` assembles the (regularized) second variation of the energy as a
/// sparse SPD matrix and factorizes it each iteration. `diagonal` keeps only
/// its diagonal: cheap per step, but the iteration count grows with the grid
/// size, so it is meant for small meshes and cross-checks.
enum class Metric { newton, diagonal };

// Starting guess on free nodes.
enum class Initialization { harmonic, zero, given };

struct LineSearchOptions {
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 60;
};

struct SolveOptions {
  double tol_energy = 1e-10;  // relative energy decrease of the last accepted step
  double tol_grad = 1e-8;     // residual sup-norm, relative to the flux scale
  int max_iters = 200;
  double eps_flux = 1e-12;    // flux vanishes on triangles with |∇u| ≤ eps_flux
  LineSearchOptions line_search{};
  Metric metric = Metric::newton;
  Initialization init = Initialization::harmonic;
};

/// Outcome of a minimization. `residual_norm` is the sup-norm of the residual
/// over free nodes divided by `residual_scale`, the characteristic nodal flux
/// max_T g(x_T, |∇u₀|)·h of the starting field; converged ⇒ residual_norm ≤ tol_grad.
struct SolveResult {
  Field field;
  double energy = 0.0;
  int iterations = 0;
  double residual_norm = 0.0;
  double residual_scale = 0.0;
  bool converged = false;
};

// Σ_T G(x_T, |∇u|_T)·|T| with x_T the centroid.
double energy(const Mesh& mesh, const PhiFunction& phi, std::span<const double> u);

// Σ_T (g(x_T,|∇u|)/|∇u|) ∇u·∇φ_i |T| at every active node.
std::vector<double> nodal_residual(const Mesh& mesh, const PhiFunction& phi, std::span<const double> u,
                                   double eps_flux = 1e-12);

// nodal_residual restricted to unconstrained (interior) nodes; zero elsewhere.
std::vector<double> energy_gradient(const Mesh& mesh, const PhiFunction& phi, std::span<const double> u,
                                    double eps_flux = 1e-12);

// Optional box constraints lo ≤ u ≤ hi on free nodes, indexed by node. An
// empty span leaves that side unbounded.
struct Bounds {
  std::span<const double> lo;
  std::span<const double> hi;
};

/// Reusable energy minimizer over a subset of free nodes; all other nodes stay
/// fixed at their current values. Work is proportional to the free set and its
/// incident triangles, so it also serves the small subdomain solves of the
/// Perron sweeps.
class Minimizer {
 public:
  Minimizer(const Mesh& mesh, const PhiFunction& phi);
  ~Minimizer();
  Minimizer(Minimizer&&) noexcept;
  Minimizer& operator=(Minimizer&&) noexcept;

  struct Stats {
    int iterations = 0;
    double energy = 0.0;  // energy of the triangles touching free nodes
    double residual_norm = 0.0;
    double residual_scale = 0.0;
    bool converged = false;
  };

  Stats minimize(Field& u, std::span<const int> free_nodes, const SolveOptions& opts, const Bounds& bounds = {});

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Nodes of class interior, i.e. the unknowns of a Dirichlet problem.
NodeSet free_nodes(const Mesh& mesh);

/// Energy minimizer agreeing with `values` on every node not listed in `free`.
/// Free nodes are initialized per opts.init (harmonic: Power(2) extension of the
/// fixed data, clamped to its range).
SolveResult solve_with_fixed(const Mesh& mesh, const PhiFunction& phi, Field values, std::span<const int> free,
                             const SolveOptions& opts);

SolveResult solve_dirichlet(const Mesh& mesh, const PhiFunction& phi, const Field& boundary_data,
                            const SolveOptions& opts = {});

// u ≤ ψ is the constraint as stated for the obstacle class; `lower` flips it to u ≥ ψ.
enum class ObstacleSide { upper, lower };

SolveResult solve_obstacle(const Mesh& mesh, const PhiFunction& phi, const Field& psi, const Field& v0,
                           const SolveOptions& opts = {}, ObstacleSide side = ObstacleSide::upper);

struct ComparisonReport {
  double max_violation = 0.0;  // max(u − v) over active nodes
  NodeSet violating;           // nodes with u − v > tol
};

ComparisonReport check_comparison(const Mesh& mesh, std::span<const double> u, std::span<const double> v,
                                  double tol);

}  // namespace orlicz

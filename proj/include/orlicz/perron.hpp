#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "orlicz/geometry.hpp"
#include "orlicz/phi.hpp"
#include "orlicz/solver.hpp"

namespace orlicz {

struct Ball {
  Point center;
  double radius;
};

struct PerronOptions {
  SolveOptions solve{};
  double tol = 1e-9;          // stop when a full sweep changes no node by more than this
  int max_sweeps = 400;
  double coarse_radius = 0.0;  // largest cover radius; 0 picks a quarter of the shorter box side
  double fine_radius = 4.0;    // in units of h, for nodes the larger balls miss
};

/// Balls D ⊂ Ω whose node sets cover every interior node, in sweep order.
/// Levels of radius R, R/2, … down to fine_radius·h are laid on lattices of
/// spacing radius/2 (row-major); a ball is kept only if all nodes strictly
/// inside it are interior, and below the top level only if it reaches a node
/// no earlier ball covers. Interior nodes still uncovered get a ball of radius
/// min(fine_radius·h, clearance) around themselves.
std::vector<Ball> ball_cover(const Mesh& mesh, const PerronOptions& opts = {});

/// Harmonic replacement of u inside D: interior nodes strictly inside the ball
/// are re-solved with the remaining nodes fixed. Throws GeometryError if D
/// holds a node that is not interior to Ω, or no node at all.
Field poisson_modification(const Mesh& mesh, const PhiFunction& phi, Field u, const Ball& D,
                           const SolveOptions& opts = {});

struct PerronSweep {
  Field field;
  int sweeps = 0;
  double last_change = 0.0;
  double max_increase = 0.0;  // largest pointwise rise between sweeps; ≤ 0 up to slack for upper sweeps
  bool converged = false;
};

// Sweeps from the constant max f over the ball cover; f is read on constrained nodes.
PerronSweep upper_perron(const Mesh& mesh, const PhiFunction& phi, const Field& f, const PerronOptions& opts = {});
// −upper_perron(−f).
PerronSweep lower_perron(const Mesh& mesh, const PhiFunction& phi, const Field& f, const PerronOptions& opts = {});

struct PerronResult {
  Field upper;
  Field lower;
  double gap = 0.0;         // sup |upper − lower| over active nodes
  double order_violation = 0.0;  // max(lower − upper)
  int sweeps = 0;           // upper + lower
  bool converged = false;
  std::vector<Ball> ball_cover;
};

PerronResult resolutivity_gap(const Mesh& mesh, const PhiFunction& phi, const Field& f,
                              const PerronOptions& opts = {});

using BoundaryFunction = std::function<double(Point)>;

// Restriction test on Ω′ = Ω ∩ B(x₀, radius).
struct RestrictionAudit {
  Point x0;
  double radius = 0.0;
  double sup_diff = 0.0;  // sup over Ω′ of |Perron(Ω′) − H_f|
  int nodes = 0;
  bool converged = false;
};

struct SobolevAgreement {
  double sup_diff = 0.0;  // sup |H̄_f − Dirichlet solution|
  int sweeps = 0;
  bool converged = false;
  std::optional<RestrictionAudit> restriction;
};

/// Compares the upper Perron solution with the variational solution for data f
/// on the mesh of `domain` at step h. With a restriction ball, Perron is rerun
/// on Ω′ = Ω ∩ B(x₀, radius) on the same grid, with data H_f on the part of ∂Ω′
/// inside Ω and f elsewhere, and compared with H_f on Ω′.
SobolevAgreement sobolev_agreement(const Domain& domain, double h, const PhiFunction& phi, const BoundaryFunction& f,
                                   const PerronOptions& opts = {}, std::optional<Ball> restriction = std::nullopt);

}  // namespace orlicz

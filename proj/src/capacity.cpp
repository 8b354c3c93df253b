#include "orlicz/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "orlicz/errors.hpp"

namespace orlicz {

CapacityResult relative_capacity(const Mesh& mesh, const PhiFunction& phi, const NodeSet& K,
                                 const SolveOptions& opts, std::string omega_spec) {
  CapacityResult out;
  out.omega_spec = std::move(omega_spec);
  out.mesh_h = mesh.h();
  out.minimizer.assign(static_cast<std::size_t>(mesh.node_count()), 0.0);
  std::vector<char> in_K(static_cast<std::size_t>(mesh.node_count()), 0);
  for (int n : K) {
    if (n < 0 || n >= mesh.node_count()) throw ShapeError("compact set refers to a node outside the mesh");
    const NodeClass c = mesh.node_class(n);
    if (c == NodeClass::dirichlet_boundary || c == NodeClass::excluded)
      throw GeometryError("compact set touches the outer boundary of the ambient set");
    in_K[static_cast<std::size_t>(n)] = 1;
  }
  for (int n = 0; n < mesh.node_count(); ++n)
    if (in_K[static_cast<std::size_t>(n)]) out.K_nodes.push_back(n);
  if (out.K_nodes.empty()) return out;

  NodeSet free;
  for (int n : free_nodes(mesh))
    if (!in_K[static_cast<std::size_t>(n)]) free.push_back(n);
  for (int n : out.K_nodes) out.minimizer[static_cast<std::size_t>(n)] = 1.0;

  auto res = solve_with_fixed(mesh, phi, std::move(out.minimizer), free, opts);
  out.value = res.energy;
  out.minimizer = std::move(res.field);
  out.iterations = res.iterations;
  out.residual_norm = res.residual_norm;
  out.converged = res.converged;
  return out;
}

NodeSet nodes_in(const Mesh& mesh, const Shape& set) {
  NodeSet out;
  const double slack = 1e-9 * mesh.h();
  for (int n = 0; n < mesh.node_count(); ++n)
    if (mesh.is_active(n) && set.sdf(mesh.node(n)) <= slack) out.push_back(n);
  return out;
}

CapacityResult ball_capacity(const PhiFunction& phi, Point x0, double r, double sigma, int nodes_per_radius,
                             const SolveOptions& opts) {
  if (!(r > 0.0) || !(sigma > 1.0)) throw DomainError("ball capacity needs r > 0 and sigma > 1");
  if (nodes_per_radius < 2) throw DomainError("need at least two nodes per radius");
  const Mesh mesh = build_ball_mesh(x0, sigma * r, r / nodes_per_radius);
  return relative_capacity(mesh, phi, nodes_in(mesh, Shape::ball(x0, r)), opts,
                           Shape::ball(x0, sigma * r).spec());
}

CapacityBounds ball_capacity_bounds(const PhiFunction& phi, Point x0, double r, double sigma, double h) {
  if (!(r > 0.0) || !std::isfinite(r) || !(sigma > 1.0)) throw DomainError("ball bounds need r > 0 and sigma > 1");
  const double R = sigma * r;
  if (!phi.box().contains_ball(x0, R)) throw GeometryError("sigma-ball leaves the box of the Phi-function");
  if (!(h > 0.0)) h = r / 16.0;
  const int m = static_cast<int>(std::floor(R / h + 1e-9));
  double lo = phi.G(x0, 1.0 / r);
  double hi = lo;
  for (int j = -m; j <= m; ++j)
    for (int i = -m; i <= m; ++i) {
      const Point p{x0.x + i * h, x0.y + j * h};
      if (distance(p, x0) > R) continue;
      const double v = phi.G(p, 1.0 / r);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  const double vol = std::numbers::pi * r * r;
  return {vol * lo, vol * hi};
}

namespace {

bool same_grid(const Mesh& a, const Mesh& b) {
  if (std::abs(a.h() - b.h()) > 1e-12 * a.h()) return false;
  const double dx = (a.origin().x - b.origin().x) / a.h();
  const double dy = (a.origin().y - b.origin().y) / a.h();
  return std::abs(dx - std::round(dx)) < 1e-6 && std::abs(dy - std::round(dy)) < 1e-6;
}

void require_nested(const NestedPair& pair) {
  const Mesh& lm = pair.lesser.mesh;
  const Mesh& gm = pair.greater.mesh;
  const std::string where = " (" + pair.lesser.label + ")";
  if (!same_grid(lm, gm)) throw ConfigError("nested capacity pair is not on a common grid" + where);
  std::vector<char> in_lesser_K(static_cast<std::size_t>(lm.node_count()), 0);
  for (int n : pair.lesser.K) in_lesser_K[static_cast<std::size_t>(n)] = 1;
  std::vector<char> in_greater_K(static_cast<std::size_t>(gm.node_count()), 0);
  for (int n : pair.greater.K) in_greater_K[static_cast<std::size_t>(n)] = 1;
  for (int n : pair.lesser.K) {
    const int m = gm.locate(lm.node(n));
    if (m < 0 || !in_greater_K[static_cast<std::size_t>(m)]) throw ConfigError("K is not contained in K'" + where);
  }
  for (int n = 0; n < gm.node_count(); ++n) {
    if (!gm.is_active(n)) continue;
    const int m = lm.locate(gm.node(n));
    if (m < 0 || !lm.is_active(m)) throw ConfigError("ambient set of K' is not contained in that of K" + where);
    const bool free_in_greater = gm.node_class(n) == NodeClass::interior && !in_greater_K[static_cast<std::size_t>(n)];
    if (free_in_greater && lm.node_class(m) != NodeClass::interior)
      throw ConfigError("ambient set of K' is not contained in that of K" + where);
  }
}

DilationRow dilation_row(const PhiFunction& phi, const DilationScenario& sc, double h, const SolveOptions& opts) {
  auto cap_in = [&](double radius) {
    const Mesh mesh = build_ball_mesh(sc.x0, radius, h);
    return relative_capacity(mesh, phi, nodes_in(mesh, sc.K), opts).value;
  };
  DilationRow row;
  row.label = sc.label;
  row.h = h;
  row.cap_2s = cap_in(2.0 * sc.s);
  row.cap_2r = sc.s == sc.r ? row.cap_2s : cap_in(2.0 * sc.r);
  row.cap_4r = sc.s == 2.0 * sc.r ? row.cap_2s : cap_in(4.0 * sc.r);
  row.c_stated = row.cap_2r / (row.cap_2s + sc.s * sc.s);
  row.c_4r = row.cap_2r / (row.cap_4r + sc.r * sc.r);
  row.ordered = row.cap_2s <= row.cap_2r + 2.0 * opts.tol_grad * (1.0 + row.cap_2r);
  return row;
}

}  // namespace

MonotonicityReport capacity_monotonicity_audit(const PhiFunction& phi, std::span<const NestedPair> pairs,
                                               std::span<const DilationScenario> dilations, double h,
                                               const SolveOptions& opts) {
  if (!(h > 0.0)) throw DomainError("mesh step must be positive");
  MonotonicityReport rep;
  for (const auto& pair : pairs) {
    require_nested(pair);
    InclusionRow row;
    row.label = pair.lesser.label + " <= " + pair.greater.label;
    row.cap_lesser = relative_capacity(pair.lesser.mesh, phi, pair.lesser.K, opts).value;
    row.cap_greater = relative_capacity(pair.greater.mesh, phi, pair.greater.K, opts).value;
    row.slack = 2.0 * opts.tol_grad * (1.0 + std::max(row.cap_lesser, row.cap_greater));
    row.holds = row.cap_lesser <= row.cap_greater + row.slack;
    rep.inclusions_hold = rep.inclusions_hold && row.holds;
    rep.inclusions.push_back(std::move(row));
  }
  for (const auto& sc : dilations) {
    if (!(sc.r > 0.0) || sc.s < sc.r || sc.s > 2.0 * sc.r)
      throw ConfigError("dilation scenario needs 0 < r <= s <= 2r (" + sc.label + ")");
  }
  for (double step : {h, 0.5 * h}) {
    double c_stated = 0.0;
    double c_4r = 0.0;
    for (const auto& sc : dilations) {
      auto row = dilation_row(phi, sc, step, opts);
      c_stated = std::max(c_stated, row.c_stated);
      c_4r = std::max(c_4r, row.c_4r);
      rep.dilations.push_back(std::move(row));
    }
    if (step == h) {
      rep.c_stated = c_stated;
      rep.c_4r = c_4r;
    } else {
      rep.c_stated_refined = c_stated;
      rep.c_4r_refined = c_4r;
    }
  }
  auto within_factor_two = [](double a, double b) { return b <= 2.0 * a + 1e-12 && a <= 2.0 * b + 1e-12; };
  rep.refinement_bounded =
      within_factor_two(rep.c_stated, rep.c_stated_refined) && within_factor_two(rep.c_4r, rep.c_4r_refined);
  return rep;
}

}  // namespace orlicz

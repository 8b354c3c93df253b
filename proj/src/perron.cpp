#include "orlicz/perron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

struct CoverEntry {
  Ball ball;
  NodeSet nodes;
};

// Nodes strictly inside the ball, or nullopt if one of them is not interior
// (grid positions off the mesh count as not interior).
std::optional<NodeSet> interior_nodes_in(const Mesh& mesh, const Ball& b) {
  const double h = mesh.h();
  const double lim = b.radius * (1.0 - 1e-9);
  const int ci = static_cast<int>(std::lround((b.center.x - mesh.origin().x) / h));
  const int cj = static_cast<int>(std::lround((b.center.y - mesh.origin().y) / h));
  const int w = static_cast<int>(std::ceil(b.radius / h));
  NodeSet out;
  for (int j = cj - w; j <= cj + w; ++j)
    for (int i = ci - w; i <= ci + w; ++i) {
      const Point p{mesh.origin().x + i * h, mesh.origin().y + j * h};
      if (distance(p, b.center) >= lim) continue;
      if (i < 0 || j < 0 || i >= mesh.nx() || j >= mesh.ny()) return std::nullopt;
      const int n = mesh.index(i, j);
      if (mesh.node_class(n) != NodeClass::interior) return std::nullopt;
      out.push_back(n);
    }
  return out;
}

// Distance from node n to the nearest non-interior grid position, capped at `cap`.
double clearance(const Mesh& mesh, int n, double cap) {
  const double h = mesh.h();
  const int ci = n % mesh.nx();
  const int cj = n / mesh.nx();
  const int w = static_cast<int>(std::ceil(cap / h));
  double best = cap;
  for (int j = cj - w; j <= cj + w; ++j)
    for (int i = ci - w; i <= ci + w; ++i) {
      const double d = h * std::hypot(i - ci, j - cj);
      if (d >= best) continue;
      const bool off = i < 0 || j < 0 || i >= mesh.nx() || j >= mesh.ny();
      if (off || mesh.node_class(mesh.index(i, j)) != NodeClass::interior) best = d;
    }
  return best;
}

std::vector<CoverEntry> build_cover(const Mesh& mesh, const PerronOptions& opts) {
  if (!(opts.fine_radius >= 1.0)) throw DomainError("fine cover radius must be at least one mesh step");
  const double h = mesh.h();
  const double fine = opts.fine_radius * h;
  double R = opts.coarse_radius;
  if (!(R > 0.0)) R = 0.25 * h * std::min(mesh.nx() - 1, mesh.ny() - 1);

  std::vector<CoverEntry> cover;
  std::vector<char> covered(static_cast<std::size_t>(mesh.node_count()), 0);
  for (double rho = R; rho >= fine * (1.0 - 1e-9); rho *= 0.5) {
    const int step = std::max(1, static_cast<int>(std::lround(0.5 * rho / h)));
    for (int j = 0; j < mesh.ny(); j += step)
      for (int i = 0; i < mesh.nx(); i += step) {
        const int c = mesh.index(i, j);
        if (mesh.node_class(c) != NodeClass::interior) continue;
        Ball b{mesh.node(c), rho};
        auto nodes = interior_nodes_in(mesh, b);
        if (!nodes || nodes->empty()) continue;
        const bool adds = std::any_of(nodes->begin(), nodes->end(),
                                      [&](int n) { return !covered[static_cast<std::size_t>(n)]; });
        if (!adds && rho < R) continue;
        for (int n : *nodes) covered[static_cast<std::size_t>(n)] = 1;
        cover.push_back({b, std::move(*nodes)});
      }
  }
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (mesh.node_class(n) != NodeClass::interior || covered[static_cast<std::size_t>(n)]) continue;
    Ball b{mesh.node(n), std::min(fine, clearance(mesh, n, fine))};
    auto nodes = interior_nodes_in(mesh, b);
    if (!nodes || nodes->empty()) throw NumericError("could not cover an interior node");
    for (int m : *nodes) covered[static_cast<std::size_t>(m)] = 1;
    cover.push_back({b, std::move(*nodes)});
  }
  return cover;
}

PerronSweep sweep(const Mesh& mesh, const PhiFunction& phi, const Field& f, const PerronOptions& opts,
                  const std::vector<CoverEntry>& cover) {
  if (static_cast<int>(f.size()) != mesh.node_count()) throw ShapeError("boundary data does not match the mesh");
  if (!(opts.tol > 0.0) || opts.max_sweeps < 1) throw DomainError("Perron sweeps need tol > 0 and max_sweeps >= 1");
  double top = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (!mesh.is_constrained(n)) continue;
    const double v = f[static_cast<std::size_t>(n)];
    if (!std::isfinite(v)) throw NumericError("boundary data is not finite");
    top = std::max(top, v);
  }
  if (!std::isfinite(top)) top = 0.0;

  PerronSweep out;
  out.field.assign(static_cast<std::size_t>(mesh.node_count()), 0.0);
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (mesh.is_constrained(n)) out.field[static_cast<std::size_t>(n)] = f[static_cast<std::size_t>(n)];
    else if (mesh.is_active(n)) out.field[static_cast<std::size_t>(n)] = top;
  }
  SolveOptions local = opts.solve;
  local.init = Initialization::given;
  Minimizer minimizer(mesh, phi);
  Field before;
  for (int s = 1; s <= opts.max_sweeps; ++s) {
    before = out.field;
    for (const auto& entry : cover) minimizer.minimize(out.field, entry.nodes, local);
    double change = 0.0;
    for (int n = 0; n < mesh.node_count(); ++n) {
      const double d = out.field[static_cast<std::size_t>(n)] - before[static_cast<std::size_t>(n)];
      change = std::max(change, std::abs(d));
      out.max_increase = std::max(out.max_increase, d);
    }
    out.sweeps = s;
    out.last_change = change;
    if (change < opts.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

Field negated(Field v) {
  for (double& x : v) x = -x;
  return v;
}

}  // namespace

std::vector<Ball> ball_cover(const Mesh& mesh, const PerronOptions& opts) {
  std::vector<Ball> out;
  for (const auto& e : build_cover(mesh, opts)) out.push_back(e.ball);
  return out;
}

Field poisson_modification(const Mesh& mesh, const PhiFunction& phi, Field u, const Ball& D,
                           const SolveOptions& opts) {
  if (static_cast<int>(u.size()) != mesh.node_count()) throw ShapeError("field does not match the mesh");
  if (!(D.radius > 0.0)) throw DomainError("ball radius must be positive");
  auto nodes = interior_nodes_in(mesh, D);
  if (!nodes) throw GeometryError("ball is not contained in the domain");
  if (nodes->empty()) throw GeometryError("ball contains no mesh node");
  SolveOptions local = opts;
  local.init = Initialization::given;
  Minimizer(mesh, phi).minimize(u, *nodes, local);
  return u;
}

PerronSweep upper_perron(const Mesh& mesh, const PhiFunction& phi, const Field& f, const PerronOptions& opts) {
  return sweep(mesh, phi, f, opts, build_cover(mesh, opts));
}

PerronSweep lower_perron(const Mesh& mesh, const PhiFunction& phi, const Field& f, const PerronOptions& opts) {
  auto s = upper_perron(mesh, phi, negated(f), opts);
  s.field = negated(std::move(s.field));
  return s;
}

PerronResult resolutivity_gap(const Mesh& mesh, const PhiFunction& phi, const Field& f, const PerronOptions& opts) {
  const auto cover = build_cover(mesh, opts);
  auto up = sweep(mesh, phi, f, opts, cover);
  auto lo = sweep(mesh, phi, negated(f), opts, cover);
  PerronResult r;
  r.upper = std::move(up.field);
  r.lower = negated(std::move(lo.field));
  r.sweeps = up.sweeps + lo.sweeps;
  r.converged = up.converged && lo.converged;
  r.order_violation = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (!mesh.is_active(n)) continue;
    const double d = r.lower[static_cast<std::size_t>(n)] - r.upper[static_cast<std::size_t>(n)];
    r.gap = std::max(r.gap, std::abs(d));
    r.order_violation = std::max(r.order_violation, d);
  }
  if (!std::isfinite(r.order_violation)) r.order_violation = 0.0;
  for (const auto& e : cover) r.ball_cover.push_back(e.ball);
  return r;
}

SobolevAgreement sobolev_agreement(const Domain& domain, double h, const PhiFunction& phi, const BoundaryFunction& f,
                                   const PerronOptions& opts, std::optional<Ball> restriction) {
  const Mesh mesh = build_mesh(domain, h);
  Field data(static_cast<std::size_t>(mesh.node_count()), 0.0);
  for (int n = 0; n < mesh.node_count(); ++n)
    if (mesh.is_active(n)) data[static_cast<std::size_t>(n)] = f(mesh.node(n));

  SobolevAgreement out;
  const auto hf = upper_perron(mesh, phi, data, opts);
  const auto sob = solve_dirichlet(mesh, phi, data, opts.solve);
  out.sweeps = hf.sweeps;
  out.converged = hf.converged && sob.converged;
  for (int n = 0; n < mesh.node_count(); ++n)
    if (mesh.is_active(n))
      out.sup_diff = std::max(out.sup_diff, std::abs(hf.field[static_cast<std::size_t>(n)] -
                                                     sob.field[static_cast<std::size_t>(n)]));
  if (!restriction) return out;

  RestrictionAudit audit;
  audit.x0 = restriction->center;
  audit.radius = restriction->radius;
  Domain sub(Shape::intersect({domain.area(), Shape::ball(restriction->center, restriction->radius)}),
             domain.bounding_box());
  for (const auto& s : domain.slits()) sub.remove_slit(s.a, s.b);
  for (const auto& p : domain.punctures())
    if (sub.area_sdf(p) <= -2.0 * h) sub.remove_point(p);
  const Mesh part = build_mesh(sub, h);  // same box and step, hence the same grid

  Field sub_data(static_cast<std::size_t>(part.node_count()), 0.0);
  for (int n = 0; n < part.node_count(); ++n) {
    if (!part.is_constrained(n)) continue;
    const int m = mesh.locate(part.node(n));
    const bool inside = m >= 0 && mesh.node_class(m) == NodeClass::interior;
    sub_data[static_cast<std::size_t>(n)] = inside ? hf.field[static_cast<std::size_t>(m)] : f(part.node(n));
  }
  const auto again = upper_perron(part, phi, sub_data, opts);
  audit.converged = again.converged;
  for (int n = 0; n < part.node_count(); ++n) {
    if (part.node_class(n) != NodeClass::interior) continue;
    const int m = mesh.locate(part.node(n));
    if (m < 0 || !mesh.is_active(m)) continue;
    ++audit.nodes;
    audit.sup_diff = std::max(audit.sup_diff, std::abs(again.field[static_cast<std::size_t>(n)] -
                                                       hf.field[static_cast<std::size_t>(m)]));
  }
  out.restriction = audit;
  out.converged = out.converged && audit.converged;
  return out;
}

}  // namespace orlicz

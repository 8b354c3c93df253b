#include "orlicz/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orlicz/capacity.hpp"
#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

bool counts(const Mesh& mesh, int n) {
  return mesh.is_active(n) && mesh.node_class(n) != NodeClass::dirichlet_boundary;
}

}  // namespace

NodalMeasure riesz_measure(const Mesh& mesh, const PhiFunction& phi, std::span<const double> u,
                           double negativity_tol) {
  NodalMeasure mu;
  mu.weights = nodal_residual(mesh, phi, u);
  mu.min_weight = std::numeric_limits<double>::infinity();
  for (int n = 0; n < mesh.node_count(); ++n) {
    const double w = mu.weights[static_cast<std::size_t>(n)];
    if (!mesh.is_active(n)) continue;
    if (mesh.node_class(n) == NodeClass::dirichlet_boundary) {
      mu.boundary_flux += w;
      continue;
    }
    mu.total += w;
    mu.min_weight = std::min(mu.min_weight, w);
    if (w < -negativity_tol) mu.negative_nodes.push_back(n);
  }
  if (!std::isfinite(mu.min_weight)) mu.min_weight = 0.0;
  return mu;
}

double measure_near(const Mesh& mesh, const NodalMeasure& mu, const NodeSet& nodes) {
  std::vector<char> mark(static_cast<std::size_t>(mesh.node_count()), 0);
  for (int n : nodes) {
    mark[static_cast<std::size_t>(n)] = 1;
    for (int m : mesh.neighbors(n)) mark[static_cast<std::size_t>(m)] = 1;
  }
  double total = 0.0;
  for (int n = 0; n < mesh.node_count(); ++n)
    if (mark[static_cast<std::size_t>(n)] && counts(mesh, n)) total += mu.weights[static_cast<std::size_t>(n)];
  return total;
}

double measure_of_ball(const Mesh& mesh, const NodalMeasure& mu, Point x0, double rho) {
  double total = 0.0;
  const double reach = rho * (1.0 + 1e-12);
  for (int n = 0; n < mesh.node_count(); ++n)
    if (counts(mesh, n) && distance(mesh.node(n), x0) <= reach) total += mu.weights[static_cast<std::size_t>(n)];
  return total;
}

PotentialResult g_potential(const Mesh& mesh, const PhiFunction& phi, const NodeSet& K, const SolveOptions& opts) {
  auto cap = relative_capacity(mesh, phi, K, opts);
  PotentialResult out{mesh, std::move(cap.minimizer), std::move(cap.K_nodes), {}};
  out.capacity_value = cap.value;
  out.iterations = cap.iterations;
  out.residual_norm = cap.residual_norm;
  out.converged = cap.converged;
  out.measure = riesz_measure(mesh, phi, out.field, 10.0 * opts.tol_grad * std::max(1.0, cap.value));
  out.measure_K = measure_near(mesh, out.measure, out.K_nodes);
  out.ratio = out.capacity_value > 0.0 ? out.measure_K / out.capacity_value : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double measure_capacity_ratio(const PotentialResult& result) {
  if (!(result.capacity_value > 0.0)) throw DomainError("measure/capacity ratio is undefined for zero capacity");
  return result.measure_K / result.capacity_value;
}

PotentialResult boundary_potential(const PhiFunction& phi, const Domain& domain, Point x0, double r, double h,
                                   const SolveOptions& opts) {
  if (!(r > 0.0) || !(h > 0.0)) throw DomainError("potential needs r > 0 and h > 0");
  const Mesh mesh = build_ball_mesh(x0, 4.0 * r, h);
  return g_potential(mesh, phi, complement_nodes(mesh, domain, x0, r), opts);
}

DecayTable potential_decay_profile(const PotentialResult& result, const PhiFunction& phi, const Domain& domain,
                                   Point x0, std::span<const double> radii, double r, const WienerOptions& wiener) {
  if (!(r > 0.0)) throw DomainError("outer radius must be positive");
  for (double rho : radii)
    if (!(rho > 0.0) || rho > r * (1.0 + 1e-12)) throw DomainError("decay radii must lie in (0, r]");
  const Mesh& mesh = result.mesh;
  DecayTable table;
  table.r = r;

  std::vector<double> ts(radii.begin(), radii.end());
  ts.push_back(r);
  std::sort(ts.begin(), ts.end(), std::greater<>());
  ts.erase(std::unique(ts.begin(), ts.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12 * a; }),
           ts.end());
  for (double t : ts) table.integrand.push_back(wiener_integrand(phi, domain, x0, t, wiener));

  // cumulative ∫_{t_k}^{r} W dt along the samples, trapezoid in ln t on W·t
  std::vector<double> cumulative(ts.size(), 0.0);
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double a = table.integrand[k - 1].W * ts[k - 1];
    const double b = table.integrand[k].W * ts[k];
    cumulative[k] = cumulative[k - 1] + 0.5 * (a + b) * std::log(ts[k - 1] / ts[k]);
  }

  std::vector<char> in_K(static_cast<std::size_t>(mesh.node_count()), 0);
  for (int n : result.K_nodes) in_K[static_cast<std::size_t>(n)] = 1;

  double previous = std::numeric_limits<double>::infinity();
  std::vector<double> sorted(radii.begin(), radii.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (double rho : sorted) {
    DecayRow row;
    row.rho = rho;
    const double reach = rho * (1.0 + 1e-12);
    double inf_u = std::numeric_limits<double>::infinity();
    for (int n = 0; n < mesh.node_count(); ++n) {
      if (!mesh.is_active(n) || distance(mesh.node(n), x0) > reach) continue;
      const double v = result.field[static_cast<std::size_t>(n)];
      inf_u = std::min(inf_u, v);
      if (!in_K[static_cast<std::size_t>(n)]) row.sup_one_minus_u = std::max(row.sup_one_minus_u, 1.0 - v);
    }
    if (!std::isfinite(inf_u)) inf_u = 0.0;
    row.log_ratio = row.sup_one_minus_u > 0.0 ? -std::log(row.sup_one_minus_u)
                                              : std::numeric_limits<double>::infinity();
    const auto k = static_cast<std::size_t>(
        std::find_if(ts.begin(), ts.end(), [&](double t) { return std::abs(t - rho) <= 1e-12 * t; }) - ts.begin());
    row.partial_integral = cumulative[k];
    row.c_fit = row.partial_integral > 0.0 ? row.log_ratio / row.partial_integral
                                           : std::numeric_limits<double>::quiet_NaN();
    row.measure_ball = measure_of_ball(mesh, result.measure, x0, rho);
    row.lemma_lhs = rho * eval_g_inverse(phi, x0, std::max(0.0, row.measure_ball) / std::pow(rho, kDim - 1));
    row.lemma_rhs = inf_u + rho;
    row.lemma_c = row.lemma_lhs > 0.0 ? row.lemma_rhs / row.lemma_lhs : std::numeric_limits<double>::infinity();
    table.monotone = table.monotone && row.sup_one_minus_u <= previous + 1e-12;
    previous = row.sup_one_minus_u;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace orlicz

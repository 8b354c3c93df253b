#include "orlicz/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

inline double at(std::span<const double> u, int n) { return u[static_cast<std::size_t>(n)]; }

void require_size(const Mesh& mesh, std::span<const double> u, const char* what) {
  if (static_cast<int>(u.size()) != mesh.node_count())
    throw ShapeError(std::string(what) + " has " + std::to_string(u.size()) + " values for " +
                     std::to_string(mesh.node_count()) + " nodes");
}

void require_finite(const Mesh& mesh, std::span<const double> u, const char* what) {
  for (int n = 0; n < mesh.node_count(); ++n)
    if (mesh.is_active(n) && !std::isfinite(at(u, n))) throw NumericError(std::string(what) + " is not finite");
}

}  // namespace

double energy(const Mesh& mesh, const PhiFunction& phi, std::span<const double> u) {
  require_size(mesh, u, "field");
  require_finite(mesh, u, "field");
  const auto& tris = mesh.triangles();
  double e = 0.0;
  for (std::size_t t = 0; t < tris.size(); ++t)
    e += phi.G(mesh.centroid(static_cast<int>(t)), norm(mesh.gradient(tris[t], u)));
  return e * mesh.triangle_area();
}

std::vector<double> nodal_residual(const Mesh& mesh, const PhiFunction& phi, std::span<const double> u,
                                   double eps_flux) {
  require_size(mesh, u, "field");
  require_finite(mesh, u, "field");
  std::vector<double> r(static_cast<std::size_t>(mesh.node_count()), 0.0);
  const auto& tris = mesh.triangles();
  const double area = mesh.triangle_area();
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const Point w = mesh.gradient(tris[t], u);
    const double s = norm(w);
    if (s <= eps_flux) continue;
    const double a = phi.g(mesh.centroid(static_cast<int>(t)), s) / s * area;
    const auto grads = mesh.hat_gradients(tris[t]);
    for (int k = 0; k < 3; ++k) r[static_cast<std::size_t>(tris[t].v[k])] += a * dot(w, grads[k]);
  }
  return r;
}

std::vector<double> energy_gradient(const Mesh& mesh, const PhiFunction& phi, std::span<const double> u,
                                    double eps_flux) {
  auto r = nodal_residual(mesh, phi, u, eps_flux);
  for (int n = 0; n < mesh.node_count(); ++n)
    if (mesh.node_class(n) != NodeClass::interior) r[static_cast<std::size_t>(n)] = 0.0;
  return r;
}

// --- Minimizer --------------------------------------------------------------

struct Minimizer::Impl {
  const Mesh* mesh;
  PhiFunction phi;
  std::vector<int> slot;      // node → unknown index, −1 if fixed
  std::vector<char> tri_mark;

  // per-call state
  std::vector<int> tris;      // triangles touching a free node
  std::vector<int> nodes;     // unknown index → node
  std::vector<int> scatter;   // 9 entries per triangle: position in the value array or −1
  SpMat matrix;
  std::vector<int> diag_pos;

  Impl(const Mesh& m, PhiFunction p)
      : mesh(&m),
        phi(std::move(p)),
        slot(static_cast<std::size_t>(m.node_count()), -1),
        tri_mark(m.triangles().size(), 0) {}

  void setup(std::span<const int> free) {
    nodes.assign(free.begin(), free.end());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const int n = nodes[k];
      if (!mesh->is_active(n)) throw GeometryError("free node is excluded from the mesh");
      if (slot[static_cast<std::size_t>(n)] != -1) throw ShapeError("free node listed twice");
      slot[static_cast<std::size_t>(n)] = static_cast<int>(k);
    }
    tris.clear();
    for (int n : nodes) {
      for (int t : mesh->triangles_of(n)) {
        if (!tri_mark[static_cast<std::size_t>(t)]) {
          tri_mark[static_cast<std::size_t>(t)] = 1;
          tris.push_back(t);
        }
      }
    }
    std::sort(tris.begin(), tris.end());
    for (int t : tris) tri_mark[static_cast<std::size_t>(t)] = 0;
  }

  void teardown() {
    for (int n : nodes) slot[static_cast<std::size_t>(n)] = -1;
  }

  int slot_of(int node) const { return slot[static_cast<std::size_t>(node)]; }

  void build_pattern() {
    const int m = static_cast<int>(nodes.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(tris.size() * 9 + nodes.size());
    for (int k = 0; k < m; ++k) trip.emplace_back(k, k, 0.0);
    const auto& all = mesh->triangles();
    for (int t : tris) {
      const auto& v = all[static_cast<std::size_t>(t)].v;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const int ka = slot_of(v[a]);
          const int kb = slot_of(v[b]);
          if (ka >= 0 && kb >= 0) trip.emplace_back(ka, kb, 0.0);
        }
    }
    matrix.resize(m, m);
    matrix.setFromTriplets(trip.begin(), trip.end());
    matrix.makeCompressed();

    auto position = [&](int row, int col) {
      const int* outer = matrix.outerIndexPtr();
      const int* inner = matrix.innerIndexPtr();
      const int* it = std::lower_bound(inner + outer[col], inner + outer[col + 1], row);
      return static_cast<int>(it - inner);
    };
    scatter.assign(tris.size() * 9, -1);
    for (std::size_t i = 0; i < tris.size(); ++i) {
      const auto& v = all[static_cast<std::size_t>(tris[i])].v;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const int ka = slot_of(v[a]);
          const int kb = slot_of(v[b]);
          if (ka >= 0 && kb >= 0) scatter[i * 9 + static_cast<std::size_t>(a * 3 + b)] = position(ka, kb);
        }
    }
    diag_pos.resize(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) diag_pos[static_cast<std::size_t>(k)] = position(k, k);
  }

  double local_energy(std::span<const double> u) const {
    const auto& all = mesh->triangles();
    double e = 0.0;
    for (int t : tris) e += phi.G(mesh->centroid(t), norm(mesh->gradient(all[static_cast<std::size_t>(t)], u)));
    return e * mesh->triangle_area();
  }

  void residual(std::span<const double> u, double eps_flux, std::vector<double>& r) const {
    r.assign(nodes.size(), 0.0);
    const auto& all = mesh->triangles();
    const double area = mesh->triangle_area();
    for (int t : tris) {
      const auto& tri = all[static_cast<std::size_t>(t)];
      const Point w = mesh->gradient(tri, u);
      const double s = norm(w);
      if (s <= eps_flux) continue;
      const double a = phi.g(mesh->centroid(t), s) / s * area;
      const auto grads = mesh->hat_gradients(tri);
      for (int k = 0; k < 3; ++k) {
        const int idx = slot_of(tri.v[k]);
        if (idx >= 0) r[static_cast<std::size_t>(idx)] += a * dot(w, grads[k]);
      }
    }
  }

  // Residual at node n as a function of its own value v, everything else fixed.
  double node_residual(Field& u, int n, double v, double eps_flux) const {
    double& un = u[static_cast<std::size_t>(n)];
    const double keep = un;
    un = v;
    const auto& all = mesh->triangles();
    const double area = mesh->triangle_area();
    double r = 0.0;
    for (int t : mesh->triangles_of(n)) {
      const auto& tri = all[static_cast<std::size_t>(t)];
      const Point w = mesh->gradient(tri, u);
      const double s = norm(w);
      if (s <= eps_flux) continue;
      const auto grads = mesh->hat_gradients(tri);
      const int k = tri.v[0] == n ? 0 : (tri.v[1] == n ? 1 : 2);
      r += phi.g(mesh->centroid(t), s) / s * area * dot(w, grads[k]);
    }
    un = keep;
    return r;
  }

  // Exact minimization of the energy in the value at node n alone: the nodal
  // residual is nondecreasing in that value, so a bracketed root search works
  // even where the residual is merely Hölder. Returns the new value.
  double relax_node(Field& u, int n, double lo, double hi, double tol, double eps_flux) const {
    const double v0 = u[static_cast<std::size_t>(n)];
    const double f0 = node_residual(u, n, v0, eps_flux);
    if (std::abs(f0) <= tol) return v0;
    const double sign = f0 > 0.0 ? -1.0 : 1.0;
    const double limit = f0 > 0.0 ? lo : hi;
    double a = v0;
    double step = 1e-9 * (1.0 + std::abs(v0));
    double b = v0;
    double fb = f0;
    for (int i = 0; i < 200; ++i) {
      b = v0 + sign * step;
      if ((sign < 0.0 && b <= limit) || (sign > 0.0 && b >= limit)) b = limit;
      fb = node_residual(u, n, b, eps_flux);
      if ((fb > 0.0) != (f0 > 0.0) || b == limit) break;
      a = b;
      step *= 2.0;
    }
    if ((fb > 0.0) == (f0 > 0.0)) return b;  // pinned at the bound
    double fa = node_residual(u, n, a, eps_flux);
    for (int i = 0; i < 100 && std::abs(fb) > tol && a != b; ++i) {
      const double mid = 0.5 * (a + b);
      if (mid == a || mid == b) break;
      const double fm = node_residual(u, n, mid, eps_flux);
      if ((fm > 0.0) == (fa > 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
        fb = fm;
      }
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
  }

  double flux_scale(std::span<const double> u) const {
    const auto& all = mesh->triangles();
    double scale = 0.0;
    for (int t : tris) {
      const double s = norm(mesh->gradient(all[static_cast<std::size_t>(t)], u));
      if (s > 0.0) scale = std::max(scale, phi.g(mesh->centroid(t), s));
    }
    return scale * mesh->h();
  }

  // Regularized second variation of the energy, assembled into `matrix`
  // (binding unknowns get identity rows) and its diagonal into `diag`.
  void assemble_metric(std::span<const double> u, const std::vector<char>& binding, double eps_flux,
                       std::vector<double>& diag) {
    const auto& all = mesh->triangles();
    const double area = mesh->triangle_area();
    double ss = 0.0;
    for (int t : tris) {
      const double s = norm(mesh->gradient(all[static_cast<std::size_t>(t)], u));
      ss += s * s;
    }
    const double s_rms = tris.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(tris.size()));
    const double floor = std::max(eps_flux, s_rms > 0.0 ? 1e-3 * s_rms : 1.0);

    double* values = matrix.valuePtr();
    std::fill(values, values + matrix.nonZeros(), 0.0);
    diag.assign(nodes.size(), 0.0);
    for (std::size_t i = 0; i < tris.size(); ++i) {
      const int t = tris[i];
      const auto& tri = all[static_cast<std::size_t>(t)];
      const Point w = mesh->gradient(tri, u);
      const double s = norm(w);
      const double sr = std::max(s, floor);
      const Point xc = mesh->centroid(t);
      const double a = phi.g(xc, sr) / sr;
      const double b = std::max(phi.dg(xc, sr), 1e-12 * a);
      // A = a I + (b − a) n nᵀ along n = ∇u/|∇u|
      double axx = a;
      double axy = 0.0;
      double ayy = a;
      if (s >= floor) {
        const double nx = w.x / s;
        const double ny = w.y / s;
        axx += (b - a) * nx * nx;
        axy += (b - a) * nx * ny;
        ayy += (b - a) * ny * ny;
      }
      const auto grads = mesh->hat_gradients(tri);
      Point ag[3];
      for (int k = 0; k < 3; ++k)
        ag[k] = {axx * grads[k].x + axy * grads[k].y, axy * grads[k].x + ayy * grads[k].y};
      for (int ka = 0; ka < 3; ++ka) {
        const int ia = slot_of(tri.v[ka]);
        if (ia < 0) continue;
        diag[static_cast<std::size_t>(ia)] += area * dot(grads[ka], ag[ka]);
        if (binding[static_cast<std::size_t>(ia)]) continue;
        for (int kb = 0; kb < 3; ++kb) {
          const int pos = scatter[i * 9 + static_cast<std::size_t>(ka * 3 + kb)];
          if (pos < 0) continue;
          const int ib = slot_of(tri.v[kb]);
          if (binding[static_cast<std::size_t>(ib)]) continue;
          values[pos] += area * dot(grads[ka], ag[kb]);
        }
      }
    }
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (binding[k]) values[diag_pos[k]] = 1.0;
      if (!(diag[k] > 0.0)) diag[k] = 1.0;
    }
  }
};

Minimizer::Minimizer(const Mesh& mesh, const PhiFunction& phi) : impl_(std::make_unique<Impl>(mesh, phi)) {}
Minimizer::~Minimizer() = default;
Minimizer::Minimizer(Minimizer&&) noexcept = default;
Minimizer& Minimizer::operator=(Minimizer&&) noexcept = default;

Minimizer::Stats Minimizer::minimize(Field& u, std::span<const int> free_nodes, const SolveOptions& opts,
                                     const Bounds& bounds) {
  if (!(opts.tol_energy > 0.0) || !(opts.tol_grad > 0.0) || opts.eps_flux < 0.0)
    throw DomainError("solver tolerances must be positive and eps_flux nonnegative");
  Impl& im = *impl_;
  const Mesh& mesh = *im.mesh;
  require_size(mesh, u, "field");
  Stats stats;
  im.setup(free_nodes);
  struct Guard {
    Impl& im;
    ~Guard() { im.teardown(); }
  } guard{im};

  const std::size_t m = im.nodes.size();
  auto lo_of = [&](std::size_t k) {
    return bounds.lo.empty() ? -std::numeric_limits<double>::infinity() : at(bounds.lo, im.nodes[k]);
  };
  auto hi_of = [&](std::size_t k) {
    return bounds.hi.empty() ? std::numeric_limits<double>::infinity() : at(bounds.hi, im.nodes[k]);
  };
  for (std::size_t k = 0; k < m; ++k) {
    double& v = u[static_cast<std::size_t>(im.nodes[k])];
    v = std::clamp(v, lo_of(k), hi_of(k));
  }
  if (m == 0) {
    stats.converged = true;
    return stats;
  }
  require_finite(mesh, u, "initial field");

  const double scale = im.flux_scale(u);
  stats.residual_scale = scale;
  const double tol_abs = opts.tol_grad * scale;

  std::vector<double> r;
  std::vector<double> diag;
  std::vector<double> dir(m);
  std::vector<double> base(m);
  std::vector<char> binding(m, 0);
  Eigen::SimplicialLDLT<SpMat> factor;
  bool pattern_ready = false;

  double E = im.local_energy(u);
  double rel_drop = std::numeric_limits<double>::infinity();
  int stall_count = 0;

  for (int it = 0;; ++it) {
    im.residual(u, opts.eps_flux, r);
    double res = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double v = at(u, im.nodes[k]);
      binding[k] = (v >= hi_of(k) && r[k] < 0.0) || (v <= lo_of(k) && r[k] > 0.0);
      if (!binding[k]) res = std::max(res, std::abs(r[k]));
    }
    stats.iterations = it;
    stats.energy = E;
    stats.residual_norm = scale > 0.0 ? res / scale : (res > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (res <= tol_abs && (it == 0 || rel_drop <= opts.tol_energy)) {
      stats.converged = true;
      break;
    }
    if (it >= opts.max_iters) break;

    bool use_newton = opts.metric == Metric::newton;
    if (use_newton) {
      if (!pattern_ready) {
        im.build_pattern();
        factor.analyzePattern(im.matrix);
        pattern_ready = true;
      }
      im.assemble_metric(u, binding, opts.eps_flux, diag);
      factor.factorize(im.matrix);
      if (factor.info() == Eigen::Success) {
        Eigen::Map<const Eigen::VectorXd> rhs(r.data(), static_cast<Eigen::Index>(m));
        Eigen::VectorXd d = factor.solve(-rhs);
        for (std::size_t k = 0; k < m; ++k) dir[k] = binding[k] ? 0.0 : d[static_cast<Eigen::Index>(k)];
      } else {
        use_newton = false;
      }
    } else {
      if (!pattern_ready) {
        im.build_pattern();
        pattern_ready = true;
      }
      im.assemble_metric(u, binding, opts.eps_flux, diag);
    }
    auto diagonal_direction = [&] {
      for (std::size_t k = 0; k < m; ++k) dir[k] = binding[k] ? 0.0 : -r[k] / diag[k];
    };
    if (!use_newton) diagonal_direction();

    for (std::size_t k = 0; k < m; ++k) base[k] = at(u, im.nodes[k]);
    const double energy_slack = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(E);
    auto try_direction = [&](double& E_new) {
      double alpha = 1.0;
      for (int bt = 0; bt <= opts.line_search.max_backtracks; ++bt) {
        double predicted = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          const double v = std::clamp(base[k] + alpha * dir[k], lo_of(k), hi_of(k));
          u[static_cast<std::size_t>(im.nodes[k])] = v;
          predicted += r[k] * (v - base[k]);
        }
        if (predicted < 0.0) {
          E_new = im.local_energy(u);
          // Near the minimizer the decrease drops below the rounding of E; the
          // slack lets the (already tiny) step through instead of stalling.
          if (E_new <= E + opts.line_search.sufficient_decrease * predicted + energy_slack) return true;
        }
        alpha *= opts.line_search.shrink;
      }
      for (std::size_t k = 0; k < m; ++k) u[static_cast<std::size_t>(im.nodes[k])] = base[k];
      return false;
    };

    // Nodal relaxation sweeps over the nodes still out of tolerance.
    auto relax = [&]() {
      for (int sweep = 0; sweep < 50; ++sweep) {
        bool moved = false;
        for (std::size_t k = 0; k < m; ++k) {
          if (std::abs(r[k]) <= tol_abs) continue;
          const int n = im.nodes[k];
          const double v = im.relax_node(u, n, lo_of(k), hi_of(k), 0.1 * tol_abs, opts.eps_flux);
          moved = moved || v != at(u, n);
          u[static_cast<std::size_t>(n)] = v;
        }
        im.residual(u, opts.eps_flux, r);
        double worst = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          const double v = at(u, im.nodes[k]);
          if (!((v >= hi_of(k) && r[k] < 0.0) || (v <= lo_of(k) && r[k] > 0.0))) worst = std::max(worst, std::abs(r[k]));
          else r[k] = 0.0;
        }
        if (worst <= tol_abs || !moved) break;
      }
    };

    double E_new = E;
    bool accepted = try_direction(E_new);
    if (!accepted && use_newton) {
      diagonal_direction();
      accepted = try_direction(E_new);
    }
    // For g₀ < 2 the residual is only Hölder in u where |∇u| → 0, so the energy
    // can stall at rounding level while the residual is still large; nodal
    // relaxation finishes the job there.
    const bool stalled = !accepted || E - E_new <= energy_slack;
    stall_count = stalled ? stall_count + 1 : 0;
    if (stalled && res > tol_abs && (stall_count >= 2 || !accepted)) {
      im.residual(u, opts.eps_flux, r);
      relax();
      E_new = im.local_energy(u);
      accepted = true;
      stall_count = 0;
    }
    if (!accepted) {
      // No representable decrease left: accept only if the residual already meets the tolerance.
      stats.converged = res <= tol_abs;
      break;
    }
    rel_drop = (E - E_new) / std::max(std::abs(E_new), std::numeric_limits<double>::min());
    E = E_new;
  }
  return stats;
}

// --- drivers ----------------------------------------------------------------

NodeSet free_nodes(const Mesh& mesh) { return mesh.nodes_of_class(NodeClass::interior); }

namespace {

void harmonic_extension(const Mesh& mesh, Field& values, std::span<const int> free, const SolveOptions& opts) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::vector<char> is_free(static_cast<std::size_t>(mesh.node_count()), 0);
  for (int n : free) is_free[static_cast<std::size_t>(n)] = 1;
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (!mesh.is_active(n) || is_free[static_cast<std::size_t>(n)]) continue;
    lo = std::min(lo, values[static_cast<std::size_t>(n)]);
    hi = std::max(hi, values[static_cast<std::size_t>(n)]);
  }
  if (!(lo <= hi)) {
    lo = hi = 0.0;
  }
  for (int n : free) values[static_cast<std::size_t>(n)] = 0.5 * (lo + hi);
  if (lo == hi) return;
  SolveOptions lin = opts;
  lin.metric = Metric::newton;
  lin.max_iters = 5;
  Minimizer(mesh, PhiFunction::power(2.0)).minimize(values, free, lin);
  for (int n : free) values[static_cast<std::size_t>(n)] = std::clamp(values[static_cast<std::size_t>(n)], lo, hi);
}

}  // namespace

SolveResult solve_with_fixed(const Mesh& mesh, const PhiFunction& phi, Field values, std::span<const int> free,
                             const SolveOptions& opts) {
  require_size(mesh, values, "data");
  for (int n = 0; n < mesh.node_count(); ++n)
    if (!mesh.is_active(n)) values[static_cast<std::size_t>(n)] = 0.0;
  switch (opts.init) {
    case Initialization::harmonic:
      harmonic_extension(mesh, values, free, opts);
      break;
    case Initialization::zero:
      for (int n : free) values[static_cast<std::size_t>(n)] = 0.0;
      break;
    case Initialization::given:
      break;
  }
  require_finite(mesh, values, "boundary data");
  Minimizer minimizer(mesh, phi);
  const auto stats = minimizer.minimize(values, free, opts);
  SolveResult out;
  out.energy = energy(mesh, phi, values);
  out.field = std::move(values);
  out.iterations = stats.iterations;
  out.residual_norm = stats.residual_norm;
  out.residual_scale = stats.residual_scale;
  out.converged = stats.converged;
  return out;
}

SolveResult solve_dirichlet(const Mesh& mesh, const PhiFunction& phi, const Field& boundary_data,
                            const SolveOptions& opts) {
  const auto free = free_nodes(mesh);
  return solve_with_fixed(mesh, phi, boundary_data, free, opts);
}

SolveResult solve_obstacle(const Mesh& mesh, const PhiFunction& phi, const Field& psi, const Field& v0,
                           const SolveOptions& opts, ObstacleSide side) {
  require_size(mesh, psi, "obstacle");
  require_size(mesh, v0, "boundary data");
  const bool upper = side == ObstacleSide::upper;
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (!mesh.is_constrained(n)) continue;
    const double d = v0[static_cast<std::size_t>(n)];
    const double o = psi[static_cast<std::size_t>(n)];
    if (std::isnan(o) || (upper ? d > o : d < o))
      throw InfeasibleError("boundary data violates the obstacle at node " + std::to_string(n));
  }
  const auto free = free_nodes(mesh);
  Field values = v0;
  for (int n = 0; n < mesh.node_count(); ++n)
    if (!mesh.is_active(n)) values[static_cast<std::size_t>(n)] = 0.0;
  if (opts.init == Initialization::harmonic) {
    harmonic_extension(mesh, values, free, opts);
  } else if (opts.init == Initialization::zero) {
    for (int n : free) values[static_cast<std::size_t>(n)] = 0.0;
  }
  Minimizer minimizer(mesh, phi);
  const Bounds bounds = upper ? Bounds{{}, psi} : Bounds{psi, {}};
  const auto stats = minimizer.minimize(values, free, opts, bounds);
  SolveResult out;
  out.energy = energy(mesh, phi, values);
  out.field = std::move(values);
  out.iterations = stats.iterations;
  out.residual_norm = stats.residual_norm;
  out.residual_scale = stats.residual_scale;
  out.converged = stats.converged;
  return out;
}

ComparisonReport check_comparison(const Mesh& mesh, std::span<const double> u, std::span<const double> v,
                                  double tol) {
  require_size(mesh, u, "first field");
  require_size(mesh, v, "second field");
  ComparisonReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (!mesh.is_active(n)) continue;
    const double d = at(u, n) - at(v, n);
    rep.max_violation = std::max(rep.max_violation, d);
    if (d > tol) rep.violating.push_back(n);
  }
  if (!std::isfinite(rep.max_violation)) rep.max_violation = 0.0;
  return rep;
}

}  // namespace orlicz

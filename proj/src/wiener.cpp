#include "orlicz/wiener.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orlicz/capacity.hpp"
#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

bool points_are_polar(const PhiFunction& phi) { return phi.sc_constants().upper <= kDim + 1e-12; }

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

WienerSample wiener_integrand(const PhiFunction& phi, const Domain& domain, Point x0, double t,
                              const WienerOptions& opts) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("scale t must be positive");
  if (opts.nodes_per_radius < 4) throw DomainError("need at least four nodes per radius");
  WienerSample s;
  s.t = t;
  s.h = t / opts.nodes_per_radius;
  const auto sample = ball_complement_intersection(domain, x0, t, s.h);
  s.complement_nodes = static_cast<int>(sample.nodes.size());
  if (sample.nodes.empty()) return s;

  const bool floor = opts.subtract_point_floor && points_are_polar(phi);
  const bool lone_center = sample.nodes.size() == 1 && sample.nodes.front() == sample.center;
  const auto raw = relative_capacity(sample.mesh, phi, sample.nodes, opts.solve);
  s.cap_raw = raw.value;
  s.converged = raw.converged;
  if (floor) {
    if (lone_center) {
      s.cap_floor = s.cap_raw;
    } else {
      const auto point = relative_capacity(sample.mesh, phi, NodeSet{sample.center}, opts.solve);
      s.cap_floor = point.value;
      s.converged = s.converged && point.converged;
    }
  }
  s.cap = std::max(0.0, s.cap_raw - s.cap_floor);
  s.W = eval_g_inverse(phi, x0, s.cap / std::pow(t, kDim - 1));
  return s;
}

const char* to_string(Regularity r) {
  switch (r) {
    case Regularity::regular:
      return "regular";
    case Regularity::irregular:
      return "irregular";
    case Regularity::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

Classification classify_regularity(std::span<const double> radii, std::span<const double> integrand,
                                   const ClassifierThresholds& th) {
  if (radii.size() != integrand.size()) throw ShapeError("radii and integrand differ in length");
  Classification out;
  const int n = static_cast<int>(radii.size());
  const int tail = std::max(th.tail_scales, 2);
  if (n < std::max(th.min_scales, tail + 1)) {
    out.warnings.push_back("too few scales (" + std::to_string(n) + ") to classify");
    return out;
  }
  for (int j = 1; j < n; ++j)
    if (!(radii[static_cast<std::size_t>(j)] < radii[static_cast<std::size_t>(j - 1)]))
      throw DomainError("radii must be strictly decreasing");

  std::vector<double> inc(static_cast<std::size_t>(n), 0.0);
  std::vector<double> sums(static_cast<std::size_t>(n), 0.0);
  std::vector<double> wt(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    wt[k] = integrand[k] * radii[k];
    if (j > 0) {
      inc[k] = integrand[k] * (radii[k - 1] - radii[k]);
      sums[k] = sums[k - 1] + inc[k];
    }
  }

  // least-squares slope of the partial sums against ln(1/t) over the tail
  double mx = 0.0;
  double my = 0.0;
  for (int j = n - tail; j < n; ++j) {
    mx += std::log(1.0 / radii[static_cast<std::size_t>(j)]);
    my += sums[static_cast<std::size_t>(j)];
  }
  mx /= tail;
  my /= tail;
  double sxy = 0.0;
  double sxx = 0.0;
  for (int j = n - tail; j < n; ++j) {
    const double dx = std::log(1.0 / radii[static_cast<std::size_t>(j)]) - mx;
    sxy += dx * (sums[static_cast<std::size_t>(j)] - my);
    sxx += dx * dx;
  }
  out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double med = median(wt);
  out.slope_threshold = th.slope_fraction * med;

  bool geometric_tail = true;
  for (int j = n - tail + 1; j < n; ++j) {
    const double prev = inc[static_cast<std::size_t>(j - 1)];
    const double cur = inc[static_cast<std::size_t>(j)];
    const double ratio = cur == 0.0 ? 0.0 : (prev > 0.0 ? cur / prev : std::numeric_limits<double>::infinity());
    geometric_tail = geometric_tail && ratio <= th.tail_ratio * (1.0 + 1e-9);
  }
  if (geometric_tail) {
    out.regularity = Regularity::irregular;
    return out;
  }
  double tail_min = std::numeric_limits<double>::infinity();
  for (int j = n - tail; j < n; ++j) tail_min = std::min(tail_min, wt[static_cast<std::size_t>(j)]);
  if (out.slope > 0.0 && out.slope >= out.slope_threshold && tail_min >= th.floor_fraction * med)
    out.regularity = Regularity::regular;
  return out;
}

Classification classify_regularity(const WienerReport& report) {
  return classify_regularity(report.radii, report.integrand, report.thresholds);
}

WienerReport wiener_integral(const PhiFunction& phi, const Domain& domain, Point x0, double rho, int j_max,
                             const WienerOptions& opts, const ClassifierThresholds& thresholds) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("rho must be positive");
  if (j_max < 0 || j_max > 12) throw DomainError("j_max must lie in [0, 12]");
  WienerReport rep;
  rep.x0 = x0;
  rep.rho = rho;
  rep.thresholds = thresholds;
  double t = rho;
  for (int j = 0; j <= j_max; ++j, t *= 0.25) {
    WienerSample s;
    try {
      s = wiener_integrand(phi, domain, x0, t, opts);
    } catch (const RefinementError& e) {
      if (j == 0) throw;
      rep.truncated = true;
      rep.warnings.push_back("stopped at scale " + std::to_string(j) + ": " + e.what());
      break;
    }
    if (!s.converged) rep.warnings.push_back("capacity solve did not converge at scale " + std::to_string(j));
    const double inc = j == 0 ? 0.0 : s.W * (4.0 * t - t);
    rep.radii.push_back(t);
    rep.cap_values.push_back(s.cap);
    rep.integrand.push_back(s.W);
    rep.increments.push_back(inc);
    rep.partial_sums.push_back(j == 0 ? 0.0 : rep.partial_sums.back() + inc);
    rep.samples.push_back(s);
  }
  const auto c = classify_regularity(rep);
  rep.slope = c.slope;
  rep.slope_threshold = c.slope_threshold;
  rep.classification = c.regularity;
  rep.warnings.insert(rep.warnings.end(), c.warnings.begin(), c.warnings.end());
  return rep;
}

ExteriorSphereReport exterior_sphere_check(const PhiFunction& phi, const Domain& domain, Point x0,
                                           std::span<const double> scales, const WienerOptions& opts) {
  ExteriorSphereReport rep;
  const double L = domain.diameter_bound();
  const double f0 = domain.area_sdf(x0);
  bool on_feature = false;
  for (const auto& s : domain.slits()) on_feature = on_feature || segment_distance(x0, s.a, s.b) <= 1e-9 * L;
  for (const auto& p : domain.punctures()) on_feature = on_feature || distance(x0, p) <= 1e-9 * L;
  rep.on_boundary = std::abs(f0) <= 1e-9 * L || on_feature;

  if (std::abs(f0) <= 1e-9 * L && !on_feature) {
    const double d = 1e-7 * L;
    const Point grad{(domain.area_sdf({x0.x + d, x0.y}) - domain.area_sdf({x0.x - d, x0.y})) / (2.0 * d),
                     (domain.area_sdf({x0.x, x0.y + d}) - domain.area_sdf({x0.x, x0.y - d})) / (2.0 * d)};
    const double gn = norm(grad);
    if (gn > 0.0) {
      rep.normal = (1.0 / gn) * grad;
      // A ball B(x₀ + ρν, ρ) misses the area when the signed distance bound at
      // its center is at least ρ; the bound underestimates, so this is conservative.
      double radius = L;
      for (int k = 0; k < 48; ++k, radius *= 0.5) {
        if (domain.area_sdf(x0 + radius * rep.normal) >= radius * (1.0 - 1e-6)) {
          rep.has_exterior_ball = true;
          rep.ball_radius = radius;
          break;
        }
      }
    }
  }

  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (double r : scales) {
    DensityRow row;
    row.r = r;
    row.cap_complement = wiener_integrand(phi, domain, x0, r, opts).cap;
    row.cap_ball = ball_capacity(phi, x0, r, 2.0, opts.nodes_per_radius, opts.solve).value;
    row.ratio = row.cap_ball > 0.0 ? row.cap_complement / row.cap_ball : 0.0;
    rep.min_ratio = std::min(rep.min_ratio, row.ratio);
    rep.rows.push_back(row);
  }
  if (rep.rows.empty()) rep.min_ratio = 0.0;
  rep.consistent = !rep.has_exterior_ball || rep.rows.empty() || rep.min_ratio >= rep.ratio_floor;
  return rep;
}

}  // namespace orlicz

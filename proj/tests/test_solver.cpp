#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/solver.hpp"

using namespace orlicz;

namespace {

Domain annulus() {
  return Domain(Shape::intersect({Shape::ball({0, 0}, 2), Shape::ball({0, 0}, 1).complement()}));
}

Field annulus_data(const Mesh& m) {
  Field f(static_cast<std::size_t>(m.node_count()), 0.0);
  for (int n = 0; n < m.node_count(); ++n) f[static_cast<std::size_t>(n)] = norm(m.node(n)) < 1.5 ? 1.0 : 0.0;
  return f;
}

double sup_error(const Mesh& m, const Field& u, const std::function<double(double)>& exact) {
  double err = 0.0;
  for (int n = 0; n < m.node_count(); ++n)
    if (m.node_class(n) == NodeClass::interior) {
      const double r = std::clamp(norm(m.node(n)), 1.0, 2.0);
      err = std::max(err, std::abs(u[static_cast<std::size_t>(n)] - exact(r)));
    }
  return err;
}

Field random_field(const Mesh& m, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(static_cast<std::size_t>(m.node_count()));
  for (auto& v : f) v = u(rng);
  return f;
}

}  // namespace

TEST_CASE("quadratic energy residual is twice the five-point Laplacian") {
  const Mesh m = build_mesh(Domain(Shape::rect({0, 0, 1, 1})), 1.0 / 8);
  const Field u = random_field(m, 3);
  const auto res = nodal_residual(m, PhiFunction::power(2.0), u);
  for (int j = 1; j < m.ny() - 1; ++j)
    for (int i = 1; i < m.nx() - 1; ++i) {
      auto at = [&](int a, int b) { return u[static_cast<std::size_t>(m.index(a, b))]; };
      const double lap = 4 * at(i, j) - at(i + 1, j) - at(i - 1, j) - at(i, j + 1) - at(i, j - 1);
      CHECK(res[static_cast<std::size_t>(m.index(i, j))] == doctest::Approx(2 * lap));
    }
}

TEST_CASE("energy gradient matches finite differences") {
  const Mesh m = build_mesh(Domain(Shape::ball({0, 0}, 1)), 1.0 / 8);
  for (const auto& phi : {PhiFunction::power(3.0),
                          PhiFunction::double_phase(2.0, 3.0, CoefficientField::step(0.5, 2.0, 0.2)),
                          PhiFunction::orlicz_log(1.5)}) {
    CAPTURE(phi.spec());
    Field u = random_field(m, 7);
    const auto grad = energy_gradient(m, phi, u);
    for (int n : free_nodes(m)) {
      if (n % 5) continue;
      const double d = 1e-6;
      Field up = u, dn = u;
      up[static_cast<std::size_t>(n)] += d;
      dn[static_cast<std::size_t>(n)] -= d;
      const double fd = (energy(m, phi, up) - energy(m, phi, dn)) / (2 * d);
      CHECK(grad[static_cast<std::size_t>(n)] == doctest::Approx(fd).epsilon(1e-5).scale(1e-6));
    }
  }
}

TEST_CASE("annulus solutions match the radial oracles") {
  const Mesh m = build_mesh(annulus(), 1.0 / 32);
  const Field data = annulus_data(m);
  SUBCASE("power 2") {
    const auto r = solve_dirichlet(m, PhiFunction::power(2.0), data);
    CHECK(r.converged);
    CHECK(sup_error(m, r.field, oracle::annulus_log) < 0.03);
  }
  SUBCASE("power 4") {
    const auto r = solve_dirichlet(m, PhiFunction::power(4.0), data);
    CHECK(r.converged);
    CHECK(sup_error(m, r.field, [](double s) { return oracle::annulus_power(4.0, s); }) < 0.03);
  }
  SUBCASE("Orlicz log against the flux oracle") {
    const auto phi = PhiFunction::orlicz_log(2.0);
    const oracle::RadialAnnulus exact([&](double t) { return phi.g({0, 0}, t); });
    const auto r = solve_dirichlet(m, phi, data);
    CHECK(r.converged);
    CHECK(sup_error(m, r.field, exact) < 0.03);
  }
  SUBCASE("the flux oracle reproduces the closed form") {
    const oracle::RadialAnnulus exact([](double t) { return 3.0 * t * t; });
    CHECK(exact(1.5) == doctest::Approx(oracle::annulus_power(3.0, 1.5)).epsilon(1e-6));
  }
}

TEST_CASE("maximum and comparison principles") {
  const Mesh m = build_mesh(Domain(Shape::ball({0, 0}, 1)), 1.0 / 16);
  const auto phi = PhiFunction::variable_exponent(CoefficientField::step(1.8, 3.0, 0.4));
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    Field lo(static_cast<std::size_t>(m.node_count()));
    for (auto& v : lo) v = u(rng);
    Field hi = lo;
    for (auto& v : hi) v += 0.5 * (u(rng) + 1.0);
    const auto a = solve_dirichlet(m, phi, lo);
    const auto b = solve_dirichlet(m, phi, hi);
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(check_comparison(m, a.field, b.field, 1e-7).max_violation <= 1e-7);
    const auto [mn, mx] = std::minmax_element(lo.begin(), lo.end());
    for (int n : free_nodes(m)) {
      CHECK(a.field[static_cast<std::size_t>(n)] >= *mn - 1e-9);
      CHECK(a.field[static_cast<std::size_t>(n)] <= *mx + 1e-9);
    }
  }
}

TEST_CASE("minimizer is a minimum: perturbations raise the energy") {
  const Mesh m = build_mesh(Domain(Shape::ball({0, 0}, 1)), 1.0 / 16);
  const auto phi = PhiFunction::power(3.0);
  Field data(static_cast<std::size_t>(m.node_count()));
  for (int n = 0; n < m.node_count(); ++n) data[static_cast<std::size_t>(n)] = m.node(n).x * m.node(n).y;
  const auto r = solve_dirichlet(m, phi, data);
  const Field pert = random_field(m, 5);
  for (double eps : {1e-2, 1e-3}) {
    Field v = r.field;
    for (int n : free_nodes(m)) v[static_cast<std::size_t>(n)] += eps * pert[static_cast<std::size_t>(n)];
    CHECK(energy(m, phi, v) >= r.energy);
  }
}

TEST_CASE("diagonal metric agrees with the Newton metric") {
  const Mesh m = build_mesh(Domain(Shape::rect({0, 0, 1, 1})), 1.0 / 8);
  const auto phi = PhiFunction::power(3.0);
  Field data(static_cast<std::size_t>(m.node_count()));
  for (int n = 0; n < m.node_count(); ++n) data[static_cast<std::size_t>(n)] = m.node(n).x;
  SolveOptions diag;
  diag.metric = Metric::diagonal;
  diag.max_iters = 5000;
  const auto a = solve_dirichlet(m, phi, data);
  const auto b = solve_dirichlet(m, phi, data, diag);
  CHECK(b.converged);
  CHECK(a.energy == doctest::Approx(b.energy).epsilon(1e-6));
  for (int n : free_nodes(m))
    CHECK(a.field[static_cast<std::size_t>(n)] == doctest::Approx(b.field[static_cast<std::size_t>(n)]).epsilon(1e-3));
}

TEST_CASE("homogeneous families commute with scaling of the data") {
  const Mesh m = build_mesh(Domain(Shape::ball({0, 0}, 1)), 1.0 / 16);
  const auto phi = PhiFunction::power(4.0);
  Field data(static_cast<std::size_t>(m.node_count()));
  for (int n = 0; n < m.node_count(); ++n) data[static_cast<std::size_t>(n)] = std::sin(3 * m.node(n).x);
  Field scaled = data;
  for (auto& v : scaled) v *= 3.0;
  const auto a = solve_dirichlet(m, phi, data);
  const auto b = solve_dirichlet(m, phi, scaled);
  for (int n : free_nodes(m))
    CHECK(b.field[static_cast<std::size_t>(n)] == doctest::Approx(3 * a.field[static_cast<std::size_t>(n)]).epsilon(1e-5).scale(1e-6));
}

TEST_CASE("obstacle problems") {
  const Mesh m = build_mesh(Domain(Shape::ball({0, 0}, 1)), 1.0 / 16);
  const auto phi = PhiFunction::power(2.0);
  Field zero(static_cast<std::size_t>(m.node_count()), 0.0);
  Field psi(static_cast<std::size_t>(m.node_count()));
  for (int n = 0; n < m.node_count(); ++n) psi[static_cast<std::size_t>(n)] = 0.5 - 2 * dot(m.node(n), m.node(n));
  const auto lower = solve_obstacle(m, phi, psi, zero, {}, ObstacleSide::lower);
  CHECK(lower.converged);
  bool touches = false;
  for (int n : free_nodes(m)) {
    CHECK(lower.field[static_cast<std::size_t>(n)] >= psi[static_cast<std::size_t>(n)] - 1e-12);
    CHECK(lower.field[static_cast<std::size_t>(n)] >= -1e-9);
    touches = touches || std::abs(lower.field[static_cast<std::size_t>(n)] - psi[static_cast<std::size_t>(n)]) < 1e-12;
  }
  CHECK(touches);

  Field neg = psi;
  for (auto& v : neg) v = -v;
  const auto upper = solve_obstacle(m, phi, neg, zero, {}, ObstacleSide::upper);
  for (int n : free_nodes(m))
    CHECK(upper.field[static_cast<std::size_t>(n)] == doctest::Approx(-lower.field[static_cast<std::size_t>(n)]).scale(1e-6));

  CHECK_THROWS_AS(solve_obstacle(m, phi, zero, Field(zero.size(), 1.0), {}, ObstacleSide::upper), InfeasibleError);
  CHECK_THROWS_AS(check_comparison(m, zero, Field(3, 0.0), 0.0), ShapeError);
}

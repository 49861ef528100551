#include <doctest.h>

#include <random>

#include "gapolyak/graph.hpp"
#include "gapolyak/problem.hpp"
#include "gapolyak/stepsize.hpp"

using namespace gapolyak;

namespace {

Eigen::VectorXd random_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(dim);
  for (int m = 0; m < dim; ++m) v(m) = normal(rng);
  return v;
}

StepSizeSystem two_agent_orthogonal() {
  // Complete K=2 graph: A is all 1/2, so B is too. Cross gradient products
  // vanish by orthogonality.
  StepSizeSystem system;
  system.two_hop = Eigen::MatrixXd::Constant(2, 2, 0.5);
  Eigen::VectorXd g1(2), g2(2), e1(2), e2(2);
  g1 << -1.0, 0.0;
  g2 << 0.0, -1.0;
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  system.gradients = {g1, g2};
  system.gaps = Eigen::MatrixXd::Zero(2, 2);
  system.errors_oracle = std::vector<Eigen::VectorXd>{e1, e2};
  return system;
}

/// Random oracle-mode instance on a random connected graph.
StepSizeSystem random_oracle_system(std::mt19937_64& rng, int num_agents,
                                    int dim) {
  auto graph = generate_erdos_renyi(num_agents, 0.7, rng());
  auto cm = metropolis_weights(graph);
  StepSizeSystem system;
  system.two_hop = cm.two_hop;
  system.gaps = Eigen::MatrixXd::Zero(num_agents, num_agents);
  std::vector<Eigen::VectorXd> errors;
  for (int k = 0; k < num_agents; ++k) {
    system.gradients.push_back(random_vector(rng, dim));
    errors.push_back(random_vector(rng, dim));
  }
  system.errors_oracle = std::move(errors);
  return system;
}

std::vector<std::optional<double>> all_alphas(const StepSizeSystem& system) {
  std::vector<std::optional<double>> alphas;
  for (int k = 0; k < system.num_agents(); ++k)
    alphas.push_back(alpha_coefficient(system, k));
  return alphas;
}

}  // namespace

TEST_CASE("build_linear_system") {
  SUBCASE("scalar instance") {
    StepSizeSystem system;
    system.two_hop = Eigen::MatrixXd::Ones(1, 1);
    system.gradients = {Eigen::VectorXd::Constant(1, -1.0)};
    system.gaps = Eigen::MatrixXd::Zero(1, 1);
    system.errors_oracle =
        std::vector<Eigen::VectorXd>{Eigen::VectorXd::Constant(1, 1.0)};
    auto [z, c] = build_linear_system(system);
    CHECK(z(0, 0) == doctest::Approx(1.0));
    CHECK(c(0) == doctest::Approx(-1.0));
    auto u = solve_dense(z, c);
    REQUIRE(u.has_value());
    CHECK((*u)(0) == doctest::Approx(1.0));
  }
  SUBCASE("orthogonal K=2 instance") {
    auto system = two_agent_orthogonal();
    auto [z, c] = build_linear_system(system);
    CHECK(z(0, 0) == doctest::Approx(0.5));
    CHECK(z(1, 1) == doctest::Approx(0.5));
    CHECK(z(0, 1) == doctest::Approx(0.0));
    CHECK(c(0) == doctest::Approx(-0.5));
    CHECK(c(1) == doctest::Approx(-0.5));
    auto u = solve_dense(z, c);
    REQUIRE(u.has_value());
    CHECK((*u)(0) == doctest::Approx(1.0));
    CHECK((*u)(1) == doctest::Approx(1.0));
  }
  SUBCASE("all-zero gradients degenerate to the zero system") {
    auto system = two_agent_orthogonal();
    system.gradients[0].setZero();
    system.gradients[1].setZero();
    auto [z, c] = build_linear_system(system);
    CHECK(z.cwiseAbs().maxCoeff() == 0.0);
    CHECK(c.cwiseAbs().maxCoeff() == 0.0);
    CHECK_FALSE(solve_dense(z, c).has_value());
  }
  SUBCASE("requires the error oracle") {
    auto system = two_agent_orthogonal();
    system.errors_oracle.reset();
    CHECK_THROWS_AS(build_linear_system(system), std::invalid_argument);
  }
}

TEST_CASE("solve_dense residual on random instances") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd z(4, 4);
    for (int i = 0; i < 16; ++i) z(i / 4, i % 4) = random_vector(rng, 1)(0);
    z = z.transpose() * z + Eigen::MatrixXd::Identity(4, 4);  // well conditioned
    Eigen::VectorXd c = random_vector(rng, 4);
    auto u = solve_dense(z, c);
    REQUIRE(u.has_value());
    CHECK((z * (*u) + c).norm() <= 1e-10);
  }
}

TEST_CASE("alpha coefficient") {
  SUBCASE("scalar formula") {
    StepSizeSystem system;
    system.two_hop = Eigen::MatrixXd::Ones(1, 1);
    Eigen::VectorXd g(2);
    g << 2.0, 0.0;
    system.gradients = {g};
    system.gaps = Eigen::MatrixXd::Zero(1, 1);
    auto alpha = alpha_coefficient(system, 0);
    REQUIRE(alpha.has_value());
    CHECK(*alpha == doctest::Approx(0.25));
  }
  SUBCASE("orthogonal cross terms vanish") {
    auto system = two_agent_orthogonal();
    auto alpha = alpha_coefficient(system, 0);
    REQUIRE(alpha.has_value());
    CHECK(*alpha == doctest::Approx(2.0));
  }
  SUBCASE("zero gradient signals skip") {
    auto system = two_agent_orthogonal();
    system.gradients[0].setZero();
    CHECK_FALSE(alpha_coefficient(system, 0).has_value());
    CHECK(alpha_coefficient(system, 1).has_value());
  }
}

TEST_CASE("kaczmarz iterate") {
  SUBCASE("K=1 production step lands on the Polyak value") {
    StepSizeSystem system;
    system.two_hop = Eigen::MatrixXd::Ones(1, 1);
    Eigen::VectorXd g(2);
    g << 2.0, 0.0;
    system.gradients = {g};
    system.gaps = Eigen::MatrixXd::Constant(1, 1, -2.0);  // J(w_opt)-J(w)
    auto mu = kaczmarz_iterate(system, StepSizeVector::Zero(1),
                               all_alphas(system), false);
    CHECK(mu(0) == doctest::Approx(0.5));
  }
  SUBCASE("orthogonal instance converges in one oracle sweep") {
    auto system = two_agent_orthogonal();
    auto mu = kaczmarz_iterate(system, StepSizeVector::Zero(2),
                               all_alphas(system), true);
    CHECK(mu(0) == doctest::Approx(1.0));
    CHECK(mu(1) == doctest::Approx(1.0));
  }
  SUBCASE("dense solution is a fixed point") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
      auto system = random_oracle_system(rng, 4, 3);
      auto [z, c] = build_linear_system(system);
      auto u = solve_dense(z, c);
      if (!u) continue;
      auto mu = kaczmarz_iterate(system, *u, all_alphas(system), true);
      CHECK((mu - *u).norm() <= 1e-12 * std::max(1.0, u->norm()));
    }
  }
  SUBCASE("skipped agent carries its value through") {
    auto system = two_agent_orthogonal();
    system.gradients[0].setZero();
    StepSizeVector mu_prev(2);
    mu_prev << 0.7, 0.1;
    auto mu = kaczmarz_iterate(system, mu_prev, all_alphas(system), true);
    CHECK(mu(0) == 0.7);
  }
}

TEST_CASE("oracle-mode convergence to the dense solution") {
  std::mt19937_64 rng(31);
  int accepted = 0, filtered = 0;
  while (accepted < 20) {
    const int n = 2 + static_cast<int>(rng() % 5);
    auto system = random_oracle_system(rng, n, 4);
    auto [z, c] = build_linear_system(system);
    auto u = solve_dense(z, c);
    if (!u) {
      ++filtered;
      continue;
    }
    auto alphas = all_alphas(system);
    Eigen::MatrixXd iteration_matrix = Eigen::MatrixXd::Identity(n, n);
    for (int k = 0; k < n; ++k)
      iteration_matrix.row(k) -= *alphas[k] * z.row(k);
    const double radius =
        iteration_matrix.eigenvalues().cwiseAbs().maxCoeff();
    if (radius > 0.9) {
      ++filtered;
      continue;
    }
    StepSizeVector mu = StepSizeVector::Zero(n);
    for (int t = 0; t < 200; ++t)
      mu = kaczmarz_iterate(system, mu, alphas, true);
    CHECK((mu - *u).norm() / u->norm() <= 1e-6);
    ++accepted;
  }
  // Not a correctness condition; guards against the filter rejecting
  // essentially everything.
  CHECK(filtered < 400);
}

TEST_CASE("graph-aware Polyak rule") {
  SUBCASE("K=1 quadratic reproduces the classic rule") {
    // J(w) = w^2/2 at w=2: gap 2, gradient 2.
    StepSizeSystem system;
    system.two_hop = Eigen::MatrixXd::Ones(1, 1);
    system.gradients = {Eigen::VectorXd::Constant(1, 2.0)};
    system.gaps = Eigen::MatrixXd::Constant(1, 1, -2.0);
    auto mu = graph_aware_polyak(system, 1, StepSizeVector::Zero(1));
    CHECK(mu(0) == doctest::Approx(0.5));
    CHECK(mu(0) ==
          doctest::Approx(classic_polyak(2.0, system.gradients[0])));
  }
  SUBCASE("random K=1 quadratics match classic Polyak to 1e-12") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
      const int dim = 1 + static_cast<int>(rng() % 5);
      auto task = generate_regression_task(1, dim, 3, 0.0, rng());
      auto w = random_vector(rng, dim);
      const double gap = full_objective(task, 0, w);  // J(w_opt) = 0
      auto g = full_gradient(task, 0, w);
      if (g.norm() == 0.0) continue;

      StepSizeSystem system;
      system.two_hop = Eigen::MatrixXd::Ones(1, 1);
      system.gradients = {g};
      system.gaps = Eigen::MatrixXd::Constant(1, 1, -gap);
      auto mu = graph_aware_polyak(system, 1, StepSizeVector::Zero(1));
      const double classic = classic_polyak(gap, g);
      CHECK(std::abs(mu(0) - classic) <= 1e-12 * std::max(1.0, classic));
    }
  }
  SUBCASE("zero gaps with nonzero gradients give a zero step") {
    auto system = two_agent_orthogonal();
    StepSizeVector prev(2);
    prev << 0.3, 0.4;
    auto mu = graph_aware_polyak(system, 3, prev);
    CHECK(mu(0) == 0.0);
    CHECK(mu(1) == 0.0);
  }
  SUBCASE("zero-gradient agent inherits the previous outer step") {
    auto system = two_agent_orthogonal();
    system.gradients[0].setZero();
    StepSizeVector prev(2);
    prev << 0.3, 0.4;
    auto mu = graph_aware_polyak(system, 2, prev);
    CHECK(mu(0) == 0.3);
  }
  SUBCASE("output is clamped at zero") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 4);
      auto system = random_oracle_system(rng, n, 3);
      // Random gaps of either sign.
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          system.gaps(k, l) = random_vector(rng, 1)(0);
      auto mu = graph_aware_polyak(system, 2, StepSizeVector::Zero(n));
      CHECK(mu.minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("classic Polyak rule") {
  Eigen::VectorXd g(2);
  g << 2.0, 0.0;
  CHECK(classic_polyak(2.0, g) == doctest::Approx(0.5));
  CHECK(classic_polyak(0.0, g) == 0.0);
  CHECK(classic_polyak(-0.1, g) == 0.0);
  CHECK(classic_polyak(1.0, Eigen::VectorXd::Zero(3)) == 0.0);
}

TEST_CASE("bound chain for deterministic quadratics") {
  std::mt19937_64 rng(53);
  auto task = generate_regression_task(4, 3, 5, 0.0, 61);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = static_cast<int>(rng() % 4);
    const int l = static_cast<int>(rng() % 4);
    auto wk = random_vector(rng, 3);
    auto wl = random_vector(rng, 3);
    const auto gk = full_gradient(task, k, wk);
    const Eigen::VectorXd error_l = task.true_param - wl;
    const double gap = task.optimal_values[k] - full_objective(task, k, wl);
    const double delta = smoothness_constant(task, k);
    const double slack = delta * (wk - wl).squaredNorm();
    CHECK(gk.dot(error_l) <= gap + slack + 1e-9);
    CHECK(gap <= gap + slack + 1e-12);
  }
}

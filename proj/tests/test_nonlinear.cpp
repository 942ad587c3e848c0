#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "drem/errors.hpp"
#include "drem/fixtures.hpp"
#include "drem/nonlinear_estimation.hpp"
#include "oracles.hpp"

using namespace dremix;

namespace {

MonotoneCertificate certificate(const ParamMap& psi_g, const Matrix& p, const Box& box, std::size_t n = 512) {
  const MonotoneCheck c = check_monotone(psi_g, p, box, n);
  REQUIRE(std::holds_alternative<MonotoneCertificate>(c));
  return std::get<MonotoneCertificate>(c);
}

Box box1(double lo, double hi) { return Box(Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi)); }

const Box kVectorBox(Eigen::Vector2d(0.1, 0.5), Eigen::Vector2d(0.6, 1.1));

}  // namespace

TEST_CASE("param map jacobians agree with finite differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const ParamMap& psi : {fixtures::scalar_example_map(), fixtures::vector_example_map()}) {
    CHECK(psi.has_analytic_jacobian());
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd th(psi.q());
      for (Eigen::Index i = 0; i < th.size(); ++i) th(i) = u(rng);
      const Matrix j = psi.jacobian(th), fd = psi.finite_difference_jacobian(th);
      CHECK((j - fd).cwiseAbs().maxCoeff() <= 1e-5 * (1.0 + j.cwiseAbs().maxCoeff()));
    }
  }
  const ParamMap no_jac("square", 1, 1, [](const Eigen::VectorXd& t) { return Eigen::VectorXd(t.array().square()); });
  CHECK_FALSE(no_jac.has_analytic_jacobian());
  CHECK(no_jac.jacobian(Eigen::VectorXd::Constant(1, 3.0))(0, 0) == doctest::Approx(6.0).epsilon(1e-8));

  const ParamMap g = fixtures::vector_example_map().restrict({0, 1});
  CHECK(g.p() == 2);
  CHECK(g(Eigen::Vector2d(0.5, 1.0))(1) == doctest::Approx(1.0 / 3.0 + 1.0 + 0.5));
  CHECK(g.jacobian(Eigen::Vector2d(0.5, 1.0))(1, 1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(fixtures::scalar_example_map().restrict({2}), DimensionError);

  const ParamMap id = ParamMap::identity(3);
  CHECK(id(Eigen::Vector3d(1, 2, 3)) == Eigen::VectorXd(Eigen::Vector3d(1, 2, 3)));
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  CHECK(ParamMap::linear(a).jacobian(Eigen::Vector2d::Zero()) == a);
  CHECK_THROWS_AS(id(Eigen::Vector2d::Zero()), DimensionError);
}

TEST_CASE("monotonicity check") {
  const Matrix one = Matrix::Identity(1, 1);
  SUBCASE("theta - exp(-theta) on [-5, 5]") {
    const auto cert = certificate(fixtures::scalar_example_map().restrict({0}), one, box1(-5.0, 5.0));
    CHECK(cert.kind == MonotoneKind::ScalarStrong);
    CHECK(cert.rho0 >= 1.0);
    CHECK(cert.rho0 == doctest::Approx(2.0 * (1.0 + std::exp(-5.0))).epsilon(1e-9));
    CHECK(cert.rho1 == doctest::Approx(cert.rho0 / 2.0));
    CHECK(cert.sample_count == 514);
  }
  SUBCASE("cos on [0, pi] fails with a witness") {
    const MonotoneCheck c = check_monotone(fixtures::scalar_example_map().restrict({1}), one, box1(0.0, M_PI), 64);
    REQUIRE(std::holds_alternative<MonotonicityViolation>(c));
    const auto& v = std::get<MonotonicityViolation>(c);
    CHECK(v.min_eigenvalue <= 0.0);
    CHECK(v.theta(0) >= 0.0);
    CHECK(v.theta(0) <= M_PI);
  }
  SUBCASE("linear map 2 theta") {
    const auto cert = certificate(ParamMap::linear(2.0 * Matrix::Identity(2, 2)), Matrix::Identity(2, 2),
                                  Box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1)), 16);
    CHECK(cert.kind == MonotoneKind::PStrong);
    CHECK(cert.rho0 == doctest::Approx(4.0));
  }
  SUBCASE("P must be positive definite") {
    CHECK_THROWS_AS(check_monotone(ParamMap::identity(2), -Matrix::Identity(2, 2), Box(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)), 4),
                    std::invalid_argument);
  }
}

TEST_CASE("secant inequality holds for issued certificates") {
  std::mt19937_64 rng(77);
  struct Case {
    ParamMap psi;
    Matrix p;
    Box box;
  };
  Matrix p2(2, 2);
  p2 << 2.0, 0.3, 0.3, 1.0;
  const std::vector<Case> cases{
      {fixtures::scalar_example_map().restrict({0}), Matrix::Identity(1, 1), box1(-5.0, 5.0)},
      {fixtures::vector_example_map().restrict({0, 1}), Matrix::Identity(2, 2), kVectorBox},
      {fixtures::vector_example_map().restrict({0, 1}), p2, Box(Eigen::Vector2d(-1.0, -1.0), Eigen::Vector2d(1.0, 1.0))},
  };
  for (const auto& c : cases) {
    const MonotoneCheck check = check_monotone(c.psi, c.p, c.box, 512);
    if (!std::holds_alternative<MonotoneCertificate>(check)) continue;
    const auto& cert = std::get<MonotoneCertificate>(check);
    const Eigen::Index q = c.psi.q();
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::VectorXd a(q), b(q);
      for (Eigen::Index i = 0; i < q; ++i) {
        std::uniform_real_distribution<double> u(c.box.lower(i), c.box.upper(i));
        a(i) = u(rng);
        b(i) = u(rng);
      }
      const Eigen::VectorXd d = a - b;
      CHECK(d.dot(c.p * (c.psi(a) - c.psi(b))) >= cert.rho1 * d.squaredNorm() - 1e-12);
    }
  }
}

TEST_CASE("factorisable regression checks its dimensions") {
  using S = AnalyticSignal;
  CHECK_THROWS_AS(FactorisableRegression({{S::constant(1.0), S::constant(1.0)}}, ParamMap::identity(2), {0, 1},
                                         Eigen::Vector2d::Zero()),
                  DimensionError);  // q = p
  CHECK_THROWS_AS(FactorisableRegression({{S::constant(1.0), S::constant(1.0)}, {S::constant(1.0), S::constant(0.0)}},
                                         fixtures::scalar_example_map(), {0}, Eigen::VectorXd::Ones(1)),
                  DimensionError);  // n = p
  CHECK_THROWS_AS(FactorisableRegression({{S::constant(1.0), S::constant(1.0)}}, fixtures::scalar_example_map(), {0, 0},
                                         Eigen::VectorXd::Ones(1)),
                  DimensionError);
  CHECK_THROWS_AS(FactorisableRegression({{S::constant(1.0)}}, fixtures::scalar_example_map(), {0}, Eigen::VectorXd::Ones(1)),
                  DimensionError);
  const FactorisableRegression reg = fixtures::vector_example_regression();
  CHECK(reg.bad_indices() == std::vector<Eigen::Index>{2});
  const Matrix m = reg.regressor_at(0.3);
  const auto y = reg.output();
  CHECK(y[0](0.3) == doctest::Approx((m * reg.psi(reg.theta_true))(0)));
  CHECK(y[1](0.3) == doctest::Approx((m * reg.psi(reg.theta_true))(1)));
}

TEST_CASE("scalar reduction") {
  const FactorisableRegression reg = fixtures::scalar_example_regression(1.0);
  const TimeGrid grid = TimeGrid::covering(0.0, 50.0, 1e-2);
  const ReducedRegression red = scalar_reduce(reg, DelayOperator(M_PI), grid);
  for (std::size_t k = 0; k < grid.size(); k += 37) {
    const double t = grid.time(k);
    CHECK(red.det_phi[k] == doctest::Approx(std::sin(t) * (1.0 / std::sqrt(t + 2.0 * M_PI) + 1.0 / std::sqrt(t + M_PI))).epsilon(1e-12).scale(1.0));
    if (std::abs(red.det_phi[k]) > 0.01) CHECK(red.mixed_output(0, static_cast<Eigen::Index>(k)) / red.det_phi[k] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-9));
  }
  CHECK(1.0 - std::exp(-1.0) == doctest::Approx(0.632).epsilon(1e-3));

  const FactorisableRegression zero_bad({{AnalyticSignal::slow_sine_entry(), AnalyticSignal::constant(0.0)}},
                                        fixtures::scalar_example_map(), {0}, Eigen::VectorXd::Ones(1));
  const ReducedRegression z = scalar_reduce(zero_bad, DelayOperator(1.0), grid);
  CHECK(z.det_phi.max_abs() == 0.0);
  CHECK(z.mixed_output.cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(scalar_reduce(fixtures::vector_example_regression(), DelayOperator(1.0), grid), DimensionError);
}

TEST_CASE("energy of the scalar reduction diverges logarithmically") {
  const ReducedRegression red = scalar_reduce(fixtures::scalar_example_regression(), DelayOperator(M_PI),
                                              TimeGrid::covering(0.0, 800.0, 1e-2));
  for (const double t : {100.0, 200.0, 400.0}) CHECK(l2_energy(red.det_phi, t, 2.0 * t) >= 0.5);
}

TEST_CASE("general reduction soundness") {
  const FactorisableRegression reg = fixtures::vector_sinusoid_regression();
  const auto cert = certificate(reg.good_map(), Matrix::Identity(2, 2), kVectorBox);
  const ParamMap g = reg.good_map();
  const Eigen::VectorXd target = g(reg.theta_true);

  SUBCASE("delay: exact from the first sample") {
    const TimeGrid grid = TimeGrid::covering(0.0, 30.0, 1e-2);
    const ReducedRegression red = general_reduce(reg, {DelayOperator(1.3)}, grid, cert);
    CHECK(red.q() == 2);
    CHECK(std::isinf(red.transient_decay_rate));
    const std::set<std::size_t> skip(red.skipped_samples.begin(), red.skipped_samples.end());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (skip.count(k)) continue;
      const double m = reg.regressor_at(grid.time(k)).norm();
      const Eigen::VectorXd r = red.mixed_output.col(static_cast<Eigen::Index>(k)) - red.det_phi[k] * target;
      CHECK(r.cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + m * m * m));
      CHECK(red.det_phi[k] == doctest::Approx(determinant(red.phi[k])).epsilon(1e-12).scale(1.0));
    }
  }
  SUBCASE("filter from rest: exact at every sample") {
    const TimeGrid grid = TimeGrid::covering(0.0, 40.0, 1e-3);
    const ReducedRegression red = general_reduce(reg, {fixtures::unit_lag()}, grid, cert, {1});
    CHECK(red.transient_decay_rate == doctest::Approx(1.0));
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      worst = std::max(worst, (red.mixed_output.col(static_cast<Eigen::Index>(k)) - red.det_phi[k] * target).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-9);
    CHECK(red.det_phi.max_abs() > 1e-3);
  }
  SUBCASE("preconditions") {
    const TimeGrid grid(0.0, 0.1, 20);
    CHECK_THROWS_AS(general_reduce(reg, {}, grid, cert), DimensionError);
    CHECK_THROWS_AS(general_reduce(reg, {DelayOperator(1.0)}, grid, cert, {2}), DimensionError);
    const auto cert1 = certificate(fixtures::scalar_example_map().restrict({0}), Matrix::Identity(1, 1), box1(-1, 1));
    CHECK_THROWS_AS(general_reduce(reg, {DelayOperator(1.0)}, grid, cert1), DimensionError);
  }
}

TEST_CASE("general reduction with all bad columns zero") {
  using S = AnalyticSignal;
  const FactorisableRegression reg({{S::sinusoid(1.0, 1.0), S::sinusoid(1.0, 1.0, 1.0), S::constant(0.0)},
                                    {S::sinusoid(1.0, 0.7), S::constant(1.0), S::constant(0.0)}},
                                   fixtures::vector_example_map(), {0, 1}, Eigen::Vector2d(0.5, 1.0));
  const auto cert = certificate(reg.good_map(), Matrix::Identity(2, 2), kVectorBox);
  const TimeGrid grid = TimeGrid::covering(0.0, 10.0, 1e-2);
  const ReducedRegression red = general_reduce(reg, {DelayOperator(0.5)}, grid, cert);
  CHECK(red.skipped_samples.empty());
  const Eigen::VectorXd target = reg.good_map()(reg.theta_true);
  for (std::size_t k = 0; k < grid.size(); k += 7)
    CHECK((red.mixed_output.col(static_cast<Eigen::Index>(k)) - red.det_phi[k] * target).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("general reduction specialises to the scalar case") {
  const FactorisableRegression reg = fixtures::scalar_example_regression(1.0);
  const TimeGrid grid = TimeGrid::covering(0.0, 60.0, 1e-3);
  const auto cert = certificate(reg.good_map(), Matrix::Identity(1, 1), box1(-5.0, 5.0));
  const ReducedRegression s = scalar_reduce(reg, DelayOperator(M_PI), grid);
  const ReducedRegression g = general_reduce(reg, {DelayOperator(M_PI)}, grid, cert);
  // the annihilator of [m_b; m_bf] is [m_bf, -m_b] up to normalisation and sign
  for (std::size_t k = 0; k < grid.size(); k += 53) {
    const double norm = std::hypot(1.0, 1.0);  // m_b = 1 and m_bf = 1
    CHECK(std::abs(g.det_phi[k]) * norm == doctest::Approx(std::abs(s.det_phi[k])).epsilon(1e-10).scale(1e-12));
  }
  const Matrix gain = 5.0 * Matrix::Identity(1, 1);
  const EstimatorRun rs = monotone_estimator(s, reg.good_map(), cert, gain, Eigen::VectorXd::Zero(1), reg.theta_true);
  const EstimatorRun rg = monotone_estimator(g, reg.good_map(), cert, 2.0 * gain, Eigen::VectorXd::Zero(1), reg.theta_true);
  CHECK(rs.final_estimate()(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rg.final_estimate()(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("scalar monotone estimator against an ode oracle") {
  const FactorisableRegression reg = fixtures::scalar_example_regression(1.0);
  const TimeGrid grid = TimeGrid::covering(0.0, 100.0, 1e-3);
  const auto cert = certificate(reg.good_map(), Matrix::Identity(1, 1), box1(-5.0, 5.0));
  const ReducedRegression red = scalar_reduce(reg, DelayOperator(M_PI), grid);
  const Matrix gain = 5.0 * Matrix::Identity(1, 1);
  const EstimatorRun run = monotone_estimator(red, reg.good_map(), cert, gain, Eigen::VectorXd::Zero(1), reg.theta_true);

  // theta' = 5 Phi (Phi psi1(1) - Phi psi1(theta)), Phi in closed form
  const double psi_true = 1.0 - std::exp(-1.0);
  const oracle::Rhs rhs = [&](const oracle::State& x, oracle::State& dx, double t) {
    const double phi = std::sin(t) * (1.0 / std::sqrt(t + 2.0 * M_PI) + 1.0 / std::sqrt(t + M_PI));
    dx[0] = 5.0 * phi * phi * (psi_true - (x[0] - std::exp(-x[0])));
  };
  const std::vector<double> times{5.0, 20.0, 50.0, 100.0};
  const auto ref = oracle::integrate(rhs, {0.0}, 0.0, times);
  for (std::size_t i = 0; i < times.size(); ++i)
    CHECK(run.estimate(0, static_cast<Eigen::Index>(grid.index_of(times[i]))) == doctest::Approx(ref[i][0]).epsilon(1e-8));
  CHECK(std::abs(run.error_at(grid.size() - 1)(0)) <= 1e-2);

  const Trajectory& v = *run.lyapunov;
  for (std::size_t k = 1; k < v.size(); ++k) CHECK(v[k] <= v[k - 1] + 1e-9);
  const double floor = 0.5 * 1e-24 / 5.0;
  for (std::size_t k = 0; k < v.size(); ++k) CHECK(v[k] <= std::max((*run.lyapunov_bound)[k] * (1.0 + 1e-6), floor));
}

TEST_CASE("monotone estimator with the identity map is linear DREM") {
  const FactorisableRegression reg({{AnalyticSignal::slow_sine_entry(), AnalyticSignal::constant(1.0)}},
                                   ParamMap("[theta, 1]", 1, 2,
                                            [](const Eigen::VectorXd& t) { return Eigen::VectorXd(Eigen::Vector2d(t(0), 1.0)); }),
                                   {0}, Eigen::VectorXd::Constant(1, 0.7));
  const TimeGrid grid = TimeGrid::covering(0.0, 30.0, 1e-3);
  const ReducedRegression red = scalar_reduce(reg, DelayOperator(M_PI), grid);
  const auto cert = certificate(ParamMap::identity(1), Matrix::Identity(1, 1), box1(-3, 3));
  const EstimatorRun run = monotone_estimator(red, ParamMap::identity(1), cert, 4.0 * Matrix::Identity(1, 1),
                                              Eigen::VectorXd::Constant(1, -1.0), reg.theta_true);
  const Eigen::MatrixXd cf = drem_closed_form_error(red.det_phi, Eigen::VectorXd::Constant(1, 4.0), run.error_at(0));
  CHECK((cf - *run.error).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("monotone estimator edge cases") {
  const FactorisableRegression reg = fixtures::scalar_example_regression(1.0);
  const TimeGrid grid(0.0, 0.1, 50);
  const auto cert = certificate(reg.good_map(), Matrix::Identity(1, 1), box1(-5.0, 5.0));
  ReducedRegression red = scalar_reduce(reg, DelayOperator(M_PI), grid);
  red.det_phi = Trajectory(grid);
  const Matrix gain = Matrix::Identity(1, 1);
  const EstimatorRun idle = monotone_estimator(red, reg.good_map(), cert, gain, Eigen::VectorXd::Constant(1, 0.3));
  CHECK(idle.final_estimate()(0) == 0.3);

  const auto cert2 = certificate(ParamMap::identity(2), Matrix::Identity(2, 2), Box(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)), 8);
  CHECK_THROWS(monotone_estimator(red, reg.good_map(), cert2, gain, Eigen::VectorXd::Zero(1)));
  CHECK_THROWS_AS(monotone_estimator(red, reg.good_map(), cert, -gain, Eigen::VectorXd::Zero(1)), std::invalid_argument);
  CHECK_THROWS_AS(monotone_estimator(red, reg.good_map(), cert, gain, Eigen::VectorXd::Zero(2)), DimensionError);
}

TEST_CASE("lyapunov bound") {
  const FactorisableRegression reg = fixtures::scalar_example_regression(1.0);
  const TimeGrid grid = TimeGrid::covering(0.0, 30.0, 1e-3);
  const auto cert = certificate(reg.good_map(), Matrix::Identity(1, 1), box1(-5.0, 5.0));
  const ReducedRegression red = scalar_reduce(reg, DelayOperator(M_PI), grid);
  const Matrix gain = 2.0 * Matrix::Identity(1, 1);

  const EstimatorRun exact = monotone_estimator(red, reg.good_map(), cert, gain, reg.theta_true, reg.theta_true);
  CHECK(exact.lyapunov_bound->max_abs() == 0.0);
  CHECK(exact.error->cwiseAbs().maxCoeff() == 0.0);

  const EstimatorRun run = monotone_estimator(red, reg.good_map(), cert, gain, Eigen::VectorXd::Constant(1, -1.0), reg.theta_true);
  const LyapunovBound b1 = lyapunov_bound(run, cert, gain, red.det_phi);
  MonotoneCertificate doubled = cert;
  doubled.rho1 *= 2.0;
  const LyapunovBound b2 = lyapunov_bound(run, doubled, gain, red.det_phi);
  const double v0 = (*run.lyapunov)[0];
  for (std::size_t k = 0; k < grid.size(); k += 301)
    CHECK(b2.bound[k] / v0 == doctest::Approx(std::pow(b1.bound[k] / v0, 2)).epsilon(1e-9));
  CHECK(b1.kappa_hat < 1e-12);  // Phi crosses zero
  CHECK(b1.exponential_rate.value_or(0.0) < 1e-12);
  CHECK(lyapunov_decay_coefficient(cert, gain) == doctest::Approx(2.0 * cert.rho1 * 2.0));
  CHECK_THROWS_AS(lyapunov_bound(run, cert, gain, Trajectory(TimeGrid(0.0, 0.1, 5))), DimensionError);
}

TEST_CASE("vector monotone estimator converges exponentially") {
  const FactorisableRegression reg = fixtures::vector_example_regression();
  const auto cert = certificate(reg.good_map(), Matrix::Identity(2, 2), kVectorBox);
  const TimeGrid grid = TimeGrid::covering(0.0, 40.0, 1e-3);
  const ReducedRegression red = general_reduce(reg, {DelayOperator(M_PI / 2.0)}, grid, cert, {0});
  CHECK(red.skipped_samples.empty());
  for (std::size_t k = 0; k < grid.size(); k += 1001) CHECK(red.det_phi[k] * red.det_phi[k] == doctest::Approx(1.0 / 3.0));
  const Matrix eye = Matrix::Identity(2, 2);
  const EstimatorRun run = monotone_estimator(red, reg.good_map(), cert, eye, Eigen::Vector2d(0.2, 0.6), reg.theta_true);
  const LyapunovBound lb = lyapunov_bound(run, cert, eye, red.det_phi);
  REQUIRE(lb.exponential_rate.has_value());
  CHECK(lb.kappa_hat == doctest::Approx(1.0 / 3.0));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(kVectorBox.contains(run.estimate.col(static_cast<Eigen::Index>(k))));
    CHECK((*run.lyapunov)[k] <= lb.bound[k] * (1.0 + 1e-6) + 1e-25);
  }
  CHECK(run.error_norm().values().back() < 1e-3);
}

TEST_CASE("overparameterised gradient") {
  const FactorisableRegression reg = fixtures::scalar_example_regression(1.0);
  const TimeGrid grid = TimeGrid::covering(0.0, 200.0, 1e-2);
  const EstimatorRun a = overparam_gradient(reg, 3.0 * Matrix::Identity(2, 2), Eigen::Vector2d::Zero(), grid);
  CHECK(a.error_at(0)(0) == doctest::Approx(-0.632).epsilon(2e-3));
  CHECK(a.error_at(0)(1) == doctest::Approx(-0.540).epsilon(2e-3));
  CHECK(a.error_norm().values().back() >= 0.05);

  Matrix g2 = Matrix::Zero(2, 2);
  g2.diagonal() << 50.0, 5.0;
  const EstimatorRun b = overparam_gradient(reg, g2, Eigen::Vector2d::Zero(), TimeGrid::covering(0.0, 200.0, 5e-3));
  CHECK(std::abs(b.error_at(b.grid.size() - 1)(0) - a.error_at(a.grid.size() - 1)(0)) > 1e-3);
  CHECK(b.error_norm().values().back() > 1e-3);  // still not converged

  const FactorisableRegression zero({{AnalyticSignal::constant(0.0), AnalyticSignal::constant(0.0)}},
                                    fixtures::scalar_example_map(), {0}, Eigen::VectorXd::Ones(1));
  const EstimatorRun idle = overparam_gradient(zero, Matrix::Identity(2, 2), Eigen::Vector2d(0.1, 0.2), TimeGrid(0.0, 0.1, 30));
  CHECK(idle.final_estimate() == Eigen::VectorXd(Eigen::Vector2d(0.1, 0.2)));
  CHECK_THROWS_AS(overparam_gradient(reg, -Matrix::Identity(2, 2), Eigen::Vector2d::Zero(), grid), std::invalid_argument);
}

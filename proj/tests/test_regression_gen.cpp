#include <doctest.h>

#include <cmath>

#include "drem/errors.hpp"
#include "drem/fixtures.hpp"
#include "drem/linear_estimation.hpp"
#include "drem/regression_gen.hpp"
#include "oracles.hpp"

using namespace dremix;

namespace {

ParametrisedSystem stable_constant_forcing(double theta) {
  ParametrisedSystem sys;
  sys.n = 1;
  sys.q = 1;
  sys.f0 = [](const Eigen::VectorXd& x, double) { return Eigen::VectorXd(-x); };
  sys.f1 = [](const Eigen::VectorXd&, const Eigen::VectorXd& th) { return Eigen::VectorXd(th); };
  sys.x_star = Eigen::VectorXd::Constant(1, theta);
  sys.xi_star = [](const Eigen::VectorXd& th) { return Eigen::VectorXd(th); };
  sys.grad_xi_star = [](const Eigen::VectorXd&) { return Matrix::Zero(1, 1); };
  sys.theta_true = Eigen::VectorXd::Constant(1, theta);
  return sys;
}

// Steady residual sup over t >= 20 of the cubic fixture held at x* + offset.
double held_residual(double x_star, double offset, const TimeGrid& grid) {
  const ParametrisedSystem sys = fixtures::cubic_sine_system(1.0, x_star, offset);
  const Eigen::MatrixXd x = simulate_system(sys, sys.x_star.array() + offset, grid);
  const Eigen::MatrixXd res = lemma1_regression(sys, x, grid).residual(sys.theta_true);
  return res.rightCols(static_cast<Eigen::Index>(grid.size() - grid.index_of(20.0))).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("filtered measurements equal the filtered unknown part plus a decaying term") {
  // x' = F0 + F1, w' = -w + F1(x): y = w + exp(-t) x(0)
  const ParametrisedSystem sys = fixtures::planar_system(Eigen::Vector2d(0.8, -0.6), true);
  const TimeGrid grid = TimeGrid::covering(0.0, 15.0, 1e-3);
  const Eigen::Vector2d x0(0.3, -0.4);
  const Eigen::MatrixXd x = simulate_system(sys, x0, grid);
  const Eigen::MatrixXd y = filter_measurements(sys, x, grid);

  const oracle::Rhs rhs = [&](const oracle::State& s, oracle::State& ds, double t) {
    const Eigen::Vector2d xs(s[0], s[1]);
    const Eigen::VectorXd f1 = sys.f1(xs, sys.theta_true);
    const Eigen::VectorXd dx = sys.f0(xs, t) + f1;
    ds = {dx(0), dx(1), -s[2] + f1(0), -s[3] + f1(1)};
  };
  const std::vector<double> times{0.5, 2.0, 7.5, 15.0};
  const auto ref = oracle::integrate(rhs, {x0(0), x0(1), 0.0, 0.0}, 0.0, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(grid.index_of(times[i]));
    for (int j = 0; j < 2; ++j) {
      CHECK(x(j, k) == doctest::Approx(ref[i][static_cast<std::size_t>(j)]).epsilon(1e-8));
      CHECK(y(j, k) == doctest::Approx(ref[i][static_cast<std::size_t>(j) + 2] + std::exp(-times[i]) * x0(j)).epsilon(1e-6).scale(1e-3));
    }
  }
  CHECK_THROWS_AS(filter_measurements(sys, x.topRows(1), grid), DimensionError);
}

TEST_CASE("constant unknown forcing is recovered") {
  const ParametrisedSystem sys = stable_constant_forcing(2.5);
  const TimeGrid grid = TimeGrid::covering(0.0, 30.0, 1e-2);
  const Eigen::MatrixXd y = filter_measurements(sys, simulate_system(sys, Eigen::VectorXd::Constant(1, -1.0), grid), grid);
  CHECK(y(0, y.cols() - 1) == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(std::abs(y(0, 0) + 1.0) < 1e-15);
}

TEST_CASE("a resting state at the origin gives zero measurements") {
  const ParametrisedSystem sys = fixtures::planar_system(Eigen::Vector2d(1.0, 1.0), false);
  const TimeGrid grid(0.0, 0.05, 200);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 200);
  CHECK(filter_measurements(sys, x, grid).cwiseAbs().maxCoeff() == 0.0);
  CHECK(simulate_system(sys, Eigen::Vector2d::Zero(), grid).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("regression layout and the operating point") {
  const TimeGrid grid = TimeGrid::covering(0.0, 25.0, 1e-2);
  const ParametrisedSystem planar = fixtures::planar_system(Eigen::Vector2d(1.0, 0.5), true);
  const Eigen::MatrixXd x = simulate_system(planar, Eigen::Vector2d(0.1, 0.2), grid);
  const Lemma1Regression reg = lemma1_regression(planar, x, grid);
  CHECK(reg.n() == 2);
  CHECK(reg.p() == 6);
  CHECK(reg.psi.q() == 2);
  const Eigen::Index k = 345;
  Matrix expect = Matrix::Zero(2, 6);
  expect.leftCols(2).setIdentity();
  expect.block(0, 2, 1, 2) = x.col(k).transpose();
  expect.block(1, 4, 1, 2) = x.col(k).transpose();
  CHECK(reg.regressor[static_cast<std::size_t>(k)] == expect);
  const Eigen::VectorXd psi = reg.psi(planar.theta_true);
  Eigen::VectorXd psi_expect(6);
  psi_expect << 0.0, 0.0, 0.0, 1.0, 0.5, 0.0;
  CHECK((psi - psi_expect).cwiseAbs().maxCoeff() == 0.0);

  const ParametrisedSystem cubic = fixtures::cubic_sine_system(1.3, 0.5, 0.0);
  const Eigen::MatrixXd held = cubic.x_star.replicate(1, static_cast<Eigen::Index>(grid.size()));
  const Lemma1Regression at = lemma1_regression(cubic, held, grid);
  for (const auto& m : at.regressor) CHECK(m == Matrix((Matrix(1, 2) << 1.0, 0.0).finished()));
  CHECK(at.output(0, at.output.cols() - 1) == doctest::Approx(1.3 * std::sin(0.5)).epsilon(1e-9));
  CHECK(std::abs(at.residual(cubic.theta_true)(0, at.output.cols() - 1)) < 1e-9);

  const auto rows = reg.regressor_rows();
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].rows() == 6);
  CHECK(rows[1](4, k) == x(0, k));
}

TEST_CASE("remainder matches the Taylor remainder of the held state") {
  const TimeGrid grid = TimeGrid::covering(0.0, 40.0, 1e-3);
  for (const double x_star : {0.0, 0.5}) {
    for (const double offset : {0.1, 0.05}) {
      const double xr = x_star + offset;
      const double taylor = std::sin(xr) - std::sin(x_star) - std::cos(x_star) * offset;
      CHECK(held_residual(x_star, offset, grid) == doctest::Approx(std::abs(taylor)).epsilon(1e-4));
    }
  }
}

TEST_CASE("remainder scaling when halving the offset") {
  const TimeGrid grid = TimeGrid::covering(0.0, 40.0, 1e-3);
  const double ratio_curved = held_residual(0.5, 0.08, grid) / held_residual(0.5, 0.04, grid);
  CHECK(ratio_curved >= 3.4);
  CHECK(ratio_curved <= 4.6);
  // sin has no curvature at 0, so the remainder is cubic there
  const double ratio_flat = held_residual(0.0, 0.1, grid) / held_residual(0.0, 0.05, grid);
  CHECK(ratio_flat >= 3.4);
  CHECK(ratio_flat == doctest::Approx(8.0).epsilon(0.02));
}

TEST_CASE("excitation of the generated regressor follows the state") {
  const TimeGrid grid = TimeGrid::covering(0.0, 60.0, 1e-2);
  double tail[2];
  for (const bool excite : {false, true}) {
    const ParametrisedSystem sys = fixtures::planar_system(Eigen::Vector2d(1.0, 0.5), excite);
    const Eigen::MatrixXd x = simulate_system(sys, Eigen::Vector2d(0.3, -0.2), grid);
    const Lemma1Regression reg = lemma1_regression(sys, x, grid);
    const Trajectory pe = pe_metric(reg.regressor_rows(), 10.0, grid);
    tail[excite] = pe.values().back();
  }
  CHECK(tail[0] < 1e-12);
  CHECK(tail[1] > 1e-4);
}

TEST_CASE("missing evaluators are rejected") {
  ParametrisedSystem sys = fixtures::cubic_sine_system(1.0, 0.5, 0.1);
  const TimeGrid grid(0.0, 0.1, 10);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(1, 10, 0.6);
  sys.grad_xi_star = nullptr;
  CHECK_NOTHROW(filter_measurements(sys, x, grid));
  CHECK_THROWS_AS(lemma1_regression(sys, x, grid), std::invalid_argument);
  sys.xi_star = nullptr;
  CHECK_THROWS_WITH_AS(sys.validate(true), doctest::Contains("Xi* evaluator"), std::invalid_argument);
  sys.f0 = nullptr;
  CHECK_THROWS_AS(simulate_system(sys, Eigen::VectorXd::Constant(1, 0.6), grid), std::invalid_argument);
  ParametrisedSystem bad = fixtures::planar_system(Eigen::Vector2d(1.0, 1.0), false);
  bad.x_star = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(bad.validate(false), std::invalid_argument);
  CHECK_THROWS_AS(simulate_system(fixtures::cubic_sine_system(1.0, 0.5, 0.1), Eigen::Vector2d::Zero(), grid), DimensionError);
}

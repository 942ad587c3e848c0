#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "drem/matalg.hpp"
#include "drem/nonlinear_estimation.hpp"
#include "drem/trajectory.hpp"

namespace dremix {

/// x' = F0(x, t) + F1(x, theta) near an operating point x*. F0 takes t so that a known
/// exogenous input can enter the known part of the dynamics.
///
/// Xi*(theta) and grad Xi*(theta) are the steady-state values of the filtered map
/// Xi = 1/(p+1) F1 at x*, supplied in closed form per system. grad_xi_star returns
/// the n x n matrix whose column i is the gradient of Xi*_i with respect to x.
struct ParametrisedSystem {
  using StateMap = std::function<Eigen::VectorXd(const Eigen::VectorXd& x, double t)>;
  using ParamStateMap = std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& theta)>;
  using ParamVector = std::function<Eigen::VectorXd(const Eigen::VectorXd& theta)>;
  using ParamMatrix = std::function<Matrix(const Eigen::VectorXd& theta)>;

  Eigen::Index n = 0;
  Eigen::Index q = 0;
  StateMap f0;
  ParamStateMap f1;
  Eigen::VectorXd x_star;
  ParamVector xi_star;
  ParamMatrix grad_xi_star;
  Eigen::VectorXd theta_true;

  /// Throws when dimensions disagree or a required evaluator is missing.
  void validate(bool need_linearisation) const;
};

/// Integrate the system itself from x0 (ground-truth state for fixtures).
Eigen::MatrixXd simulate_system(const ParametrisedSystem& sys, const Eigen::VectorXd& x0, const TimeGrid& grid);

/// y = x - 1/(p+1) (x + F0(x)), the strictly proper form of p/(p+1) x - 1/(p+1) F0(x).
/// x is n x samples; zero filter state.
Eigen::MatrixXd filter_measurements(const ParametrisedSystem& sys, const Eigen::MatrixXd& x, const TimeGrid& grid);

/// Separable regression y ~ m(t) psi(theta) with m = [I_n | blockdiag(x~^T)] and
/// psi = [Xi*; grad Xi*_1; ...; grad Xi*_n], p = n + n^2.
struct Lemma1Regression {
  TimeGrid grid;
  std::vector<Matrix> regressor;  // n x p per sample
  Eigen::MatrixXd output;         // n x samples
  ParamMap psi;

  Eigen::Index n() const { return output.rows(); }
  Eigen::Index p() const { return psi.p(); }
  /// y - m psi(theta), n x samples.
  Eigen::MatrixXd residual(const Eigen::VectorXd& theta) const;
  /// Regressor in the per-row layout pe_metric expects.
  std::vector<Eigen::MatrixXd> regressor_rows() const;
};

Lemma1Regression lemma1_regression(const ParametrisedSystem& sys, const Eigen::MatrixXd& x, const TimeGrid& grid);

}  // namespace dremix

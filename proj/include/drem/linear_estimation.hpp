#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "drem/matalg.hpp"
#include "drem/signals.hpp"
#include "drem/trajectory.hpp"

namespace dremix {

/// y(t) = m(t)^T theta with a closed-form regressor. theta_true only exists so that
/// simulations can synthesise y; estimators never read it except to report errors.
struct LinearRegression {
  std::vector<AnalyticSignal> regressor;
  Eigen::VectorXd theta_true;

  LinearRegression(std::vector<AnalyticSignal> m, Eigen::VectorXd theta);

  Eigen::Index q() const { return static_cast<Eigen::Index>(regressor.size()); }
  Eigen::VectorXd regressor_at(double t) const;
  AnalyticSignal output() const;
};

/// DREM data on a grid: the stacked regression Y_e = M_e theta and its mixed form
/// Y = adj(M_e) Y_e = phi * theta, phi = det(M_e).
struct ExtendedRegression {
  TimeGrid grid;
  std::vector<SignalOperator> operators;
  Eigen::MatrixXd stacked_output;        // q x n, column k = Y_e(t_k)
  std::vector<Matrix> stacked_regressor; // n matrices q x q, M_e(t_k)
  Trajectory phi;
  Eigen::MatrixXd mixed_output;          // q x n, column k = Y(t_k)

  Eigen::Index q() const { return stacked_output.rows(); }
  Trajectory mixed_row(Eigen::Index i) const;
  /// Decay rate of the slowest operator transient (+inf when all operators are delays).
  double transient_decay_rate() const;
};

/// Output of any estimator simulation.
struct EstimatorRun {
  TimeGrid grid;
  Eigen::MatrixXd estimate;               // dim x n
  std::optional<Eigen::MatrixXd> error;   // estimate - truth, when truth is known
  Matrix gain;                            // Gamma, or diag(gamma_i) for DREM
  std::optional<Trajectory> excitation;   // phi or det(Phi)
  std::optional<Trajectory> energy;       // running integral of excitation^2
  std::optional<Trajectory> lyapunov;     // V(t)
  std::optional<Trajectory> lyapunov_bound;

  Eigen::Index dim() const { return estimate.rows(); }
  Eigen::VectorXd final_estimate() const { return estimate.col(estimate.cols() - 1); }
  Eigen::VectorXd error_at(std::size_t k) const;
  /// |error(t_k)| for every sample.
  Trajectory error_norm() const;
};

/// Gradient estimator theta_hat' = Gamma m (y - m^T theta_hat). Gamma must be
/// symmetric positive definite.
EstimatorRun gradient_simulate(const LinearRegression& reg, const Matrix& gain,
                               const Eigen::VectorXd& theta_hat0, const TimeGrid& grid);

/// Sliding-window excitation level: lambda_min of the trapezoidal Gram integral of the
/// regressor over [t, t + window], for every window start on the grid. The regressor is
/// given per output row: rows[i] is p x n with column k holding row i of m(t_k)
/// (a vector regressor is a single row). The returned grid starts at grid.t0().
Trajectory pe_metric(const std::vector<Eigen::MatrixXd>& rows, double window, const TimeGrid& grid);
Trajectory pe_metric(const std::vector<AnalyticSignal>& regressor, double window, const TimeGrid& grid);

/// Build the stacked and mixed regressions. Needs exactly q - 1 operators; operator i
/// produces row i + 1 of M_e. Operators start from zero state.
ExtendedRegression drem_extend(const LinearRegression& reg, const std::vector<SignalOperator>& operators,
                               const TimeGrid& grid);

/// Decoupled scalar estimators theta_hat_i' = gamma_i phi (Y_i - phi theta_hat_i).
EstimatorRun drem_simulate(const ExtendedRegression& ext, const Eigen::VectorXd& gains,
                           const Eigen::VectorXd& theta_hat0,
                           const std::optional<Eigen::VectorXd>& theta_true = std::nullopt);

/// Closed-form error theta_tilde_i(t) = exp(-gamma_i int_0^t phi^2) theta_tilde_i(0), q x n.
Eigen::MatrixXd drem_closed_form_error(const Trajectory& phi, const Eigen::VectorXd& gains,
                                       const Eigen::VectorXd& theta_tilde0);

}  // namespace dremix

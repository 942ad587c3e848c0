#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "drem/linear_estimation.hpp"
#include "drem/matalg.hpp"
#include "drem/signals.hpp"

namespace dremix {

/// Known parameter map psi: R^q -> R^p with its Jacobian (p x q, entry (i, j) is
/// d psi_i / d theta_j). When no analytic Jacobian is supplied, central differences
/// with step 1e-6 * (1 + |theta|) are used.
class ParamMap {
 public:
  using Eval = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using Jac = std::function<Matrix(const Eigen::VectorXd&)>;

  ParamMap(std::string label, Eigen::Index q, Eigen::Index p, Eval eval, Jac jac = {});

  static ParamMap identity(Eigen::Index q);
  static ParamMap linear(const Matrix& a);

  Eigen::Index q() const { return q_; }
  Eigen::Index p() const { return p_; }
  const std::string& label() const { return label_; }
  bool has_analytic_jacobian() const { return static_cast<bool>(jac_); }

  Eigen::VectorXd operator()(const Eigen::VectorXd& theta) const;
  Matrix jacobian(const Eigen::VectorXd& theta) const;
  Matrix finite_difference_jacobian(const Eigen::VectorXd& theta) const;

  /// The components listed in rows, in that order.
  ParamMap restrict(const std::vector<Eigen::Index>& rows) const;

 private:
  std::string label_;
  Eigen::Index q_;
  Eigen::Index p_;
  Eval eval_;
  Jac jac_;
};

/// Axis-aligned parameter box.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  Eigen::Index dim() const { return lower.size(); }
  bool contains(const Eigen::VectorXd& theta) const;
};

enum class MonotoneKind { ScalarStrong, PStrong };

/// Sampled evidence that P J(theta) + J(theta)^T P >= rho0 I on the box.
/// rho1 is the secant constant used by the Lyapunov bound.
struct MonotoneCertificate {
  MonotoneKind kind;
  Matrix p;
  double rho0;
  double rho1;
  Box domain;
  std::size_t sample_count;
};

struct MonotonicityViolation {
  Eigen::VectorXd theta;   // sample with the smallest eigenvalue
  double min_eigenvalue;   // <= 0
};

using MonotoneCheck = std::variant<MonotoneCertificate, MonotonicityViolation>;

/// Evaluate the symmetrised Jacobian condition on the box vertices plus n_samples Halton
/// points. P must be symmetric positive definite.
MonotoneCheck check_monotone(const ParamMap& psi_g, const Matrix& p, const Box& domain, std::size_t n_samples);

/// y(t) = m(t) psi(theta), y in R^n, m in R^{n x p}, theta in R^q. good_indices picks the
/// q columns of m (components of psi) that carry the monotone part.
struct FactorisableRegression {
  std::vector<std::vector<AnalyticSignal>> m;  // n rows of p signals
  ParamMap psi;
  std::vector<Eigen::Index> good_indices;
  Eigen::VectorXd theta_true;

  FactorisableRegression(std::vector<std::vector<AnalyticSignal>> m, ParamMap psi,
                         std::vector<Eigen::Index> good_indices, Eigen::VectorXd theta_true);

  Eigen::Index n() const { return static_cast<Eigen::Index>(m.size()); }
  Eigen::Index p() const { return psi.p(); }
  Eigen::Index q() const { return psi.q(); }
  std::vector<Eigen::Index> bad_indices() const;
  ParamMap good_map() const { return psi.restrict(good_indices); }
  Matrix regressor_at(double t) const;
  /// y_i(t) = sum_j m_ij(t) psi_j(theta_true)
  std::vector<AnalyticSignal> output() const;
};

/// Regression Y = det(Phi) psi_g(theta) containing only the monotone components.
struct ReducedRegression {
  TimeGrid grid;
  std::vector<Matrix> phi;        // q x q per sample
  Eigen::MatrixXd mixed_output;   // q x n
  Trajectory det_phi;
  std::vector<std::size_t> skipped_samples;
  double transient_decay_rate;    // slowest operator transient, +inf for delays

  Eigen::Index q() const { return mixed_output.rows(); }
};

/// Single-output, two-column case: Y = m_bf y - m_b y_f, Phi = m_bf m_g - m_b m_gf, where g
/// and b are the good and bad columns.
ReducedRegression scalar_reduce(const FactorisableRegression& reg, const SignalOperator& op, const TimeGrid& grid);

/// General reduction with p - n operators. Operator i filters row filtered_rows[i] (default
/// round-robin i mod n). Per sample: N = left_annihilator(M_b), Phi = N M_g,
/// Y = adj(Phi) N [y; y_f]. Samples where M_b loses rank are skipped with det(Phi) := 0.
ReducedRegression general_reduce(const FactorisableRegression& reg, const std::vector<SignalOperator>& operators,
                                 const TimeGrid& grid, const MonotoneCertificate& cert,
                                 std::vector<Eigen::Index> filtered_rows = {});

/// theta_hat' = det(Phi) Gamma P [Y - det(Phi) psi_g(theta_hat)]. With theta_true given, the
/// run also carries V = 0.5 theta_tilde^T Gamma^{-1} theta_tilde and its analytic bound.
EstimatorRun monotone_estimator(const ReducedRegression& red, const ParamMap& psi_g, const MonotoneCertificate& cert,
                                const Matrix& gain, const Eigen::VectorXd& theta_hat0,
                                const std::optional<Eigen::VectorXd>& theta_true = std::nullopt);

/// Coefficient c in V' <= -c det(Phi)^2 V, i.e. 2 rho1 lambda_min(Gamma).
double lyapunov_decay_coefficient(const MonotoneCertificate& cert, const Matrix& gain);

struct LyapunovBound {
  Trajectory bound;                        // exp(-c int_0^t det^2) V(0)
  double kappa_hat;                        // inf det^2 over the horizon
  std::optional<double> exponential_rate;  // c * kappa_hat, when kappa_hat > 0
};

LyapunovBound lyapunov_bound(const EstimatorRun& run, const MonotoneCertificate& cert, const Matrix& gain,
                             const Trajectory& det_phi);

/// Linear gradient on eta = psi(theta): eta_hat' = Gamma m^T (y - m eta_hat). The run is in
/// eta-space; its error is eta_hat - psi(theta_true).
EstimatorRun overparam_gradient(const FactorisableRegression& reg, const Matrix& gain,
                                const Eigen::VectorXd& eta_hat0, const TimeGrid& grid);

}  // namespace dremix

#include "drem/linear_estimation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "drem/errors.hpp"
#include "drem/rk4.hpp"

namespace dremix {

LinearRegression::LinearRegression(std::vector<AnalyticSignal> m, Eigen::VectorXd theta)
    : regressor(std::move(m)), theta_true(std::move(theta)) {
  if (regressor.empty()) throw DimensionError("LinearRegression: empty regressor");
  if (theta_true.size() != q())
    throw DimensionError("LinearRegression: theta has " + std::to_string(theta_true.size()) +
                         " entries for a regressor of length " + std::to_string(q()));
}

Eigen::VectorXd LinearRegression::regressor_at(double t) const {
  Eigen::VectorXd m(q());
  for (Eigen::Index i = 0; i < q(); ++i) m(i) = regressor[static_cast<std::size_t>(i)](t);
  return m;
}

AnalyticSignal LinearRegression::output() const {
  AnalyticSignal y = regressor[0].scaled(theta_true(0));
  for (Eigen::Index i = 1; i < q(); ++i) y = y + regressor[static_cast<std::size_t>(i)].scaled(theta_true(i));
  return y;
}

Trajectory ExtendedRegression::mixed_row(Eigen::Index i) const {
  std::vector<double> v(mixed_output.cols());
  for (Eigen::Index k = 0; k < mixed_output.cols(); ++k) v[static_cast<std::size_t>(k)] = mixed_output(i, k);
  return Trajectory(grid, std::move(v));
}

double ExtendedRegression::transient_decay_rate() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& op : operators) r = std::min(r, operator_decay_rate(op));
  return r;
}

Eigen::VectorXd EstimatorRun::error_at(std::size_t k) const {
  if (!error) throw std::logic_error("EstimatorRun: no ground truth recorded");
  return error->col(static_cast<Eigen::Index>(k));
}

Trajectory EstimatorRun::error_norm() const {
  if (!error) throw std::logic_error("EstimatorRun: no ground truth recorded");
  std::vector<double> v(static_cast<std::size_t>(error->cols()));
  for (Eigen::Index k = 0; k < error->cols(); ++k) v[static_cast<std::size_t>(k)] = error->col(k).norm();
  return Trajectory(grid, std::move(v));
}

EstimatorRun gradient_simulate(const LinearRegression& reg, const Matrix& gain,
                               const Eigen::VectorXd& theta_hat0, const TimeGrid& grid) {
  const Eigen::Index q = reg.q();
  if (gain.rows() != q || gain.cols() != q) throw DimensionError("gradient_simulate: gain must be q x q");
  if (theta_hat0.size() != q) throw DimensionError("gradient_simulate: initial estimate must have q entries");
  if (!is_positive_definite(gain)) throw std::invalid_argument("gradient_simulate: gain is not positive definite");

  const AnalyticSignal y = reg.output();
  const VectorField rhs = [&](double t, const Eigen::VectorXd& th, Eigen::VectorXd& dth) {
    const Eigen::VectorXd m = reg.regressor_at(t);
    dth.noalias() = gain * m * (y(t) - m.dot(th));
  };
  StateHistory h = rk4_integrate(rhs, theta_hat0, grid);

  EstimatorRun run{grid, std::move(h.states), std::nullopt, gain, {}, {}, {}, {}};
  run.error = run.estimate.colwise() - reg.theta_true;
  return run;
}

Trajectory pe_metric(const std::vector<Eigen::MatrixXd>& rows, double window, const TimeGrid& grid) {
  if (rows.empty()) throw DimensionError("pe_metric: empty regressor");
  if (!(window > 0.0)) throw std::invalid_argument("pe_metric: window must be positive");
  const Eigen::Index p = rows[0].rows();
  const auto n = static_cast<Eigen::Index>(grid.size());
  for (const auto& r : rows)
    if (r.rows() != p || r.cols() != n) throw DimensionError("pe_metric: regressor rows do not match the grid");
  const auto w = static_cast<Eigen::Index>(std::llround(window / grid.dt()));
  if (w < 1 || n - w < 2)
    throw std::invalid_argument("pe_metric: window longer than the grid span");

  // Running trapezoidal Gram integrals, one p x p block per sample, stored column-wise.
  Eigen::MatrixXd cum = Eigen::MatrixXd::Zero(p * p, n);
  auto outer = [&](Eigen::Index k) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p, p);
    for (const auto& r : rows) g.noalias() += r.col(k) * r.col(k).transpose();
    return g;
  };
  Eigen::MatrixXd prev = outer(0);
  for (Eigen::Index k = 1; k < n; ++k) {
    Eigen::MatrixXd cur = outer(k);
    Eigen::MatrixXd step = 0.5 * grid.dt() * (prev + cur);
    cum.col(k) = cum.col(k - 1) + Eigen::Map<Eigen::VectorXd>(step.data(), p * p);
    prev = std::move(cur);
  }

  std::vector<double> out(static_cast<std::size_t>(n - w));
  for (Eigen::Index k = 0; k < n - w; ++k) {
    Eigen::VectorXd diff = cum.col(k + w) - cum.col(k);
    Matrix gram = Eigen::Map<Matrix>(diff.data(), p, p);
    out[static_cast<std::size_t>(k)] = min_eig_sym(0.5 * (gram + gram.transpose()));
  }
  const TimeGrid starts(grid.t0(), grid.dt(), out.size());
  return Trajectory(starts, std::move(out));
}

Trajectory pe_metric(const std::vector<AnalyticSignal>& regressor, double window, const TimeGrid& grid) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(regressor.size()), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < regressor.size(); ++i) {
    const Trajectory s = sample(regressor[i], grid);
    for (std::size_t k = 0; k < grid.size(); ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = s[k];
  }
  return pe_metric(std::vector<Eigen::MatrixXd>{m}, window, grid);
}

ExtendedRegression drem_extend(const LinearRegression& reg, const std::vector<SignalOperator>& operators,
                               const TimeGrid& grid) {
  const Eigen::Index q = reg.q();
  if (static_cast<Eigen::Index>(operators.size()) != q - 1)
    throw DimensionError("drem_extend: need " + std::to_string(q - 1) + " operators, got " +
                         std::to_string(operators.size()));
  const auto n = static_cast<Eigen::Index>(grid.size());
  const AnalyticSignal y = reg.output();

  // rows[r][j]: entry j of row r of M_e; outs[r]: entry r of Y_e.
  std::vector<std::vector<Trajectory>> rows;
  std::vector<Trajectory> outs;
  rows.reserve(static_cast<std::size_t>(q));
  std::vector<Trajectory> first;
  for (const auto& m : reg.regressor) first.push_back(sample(m, grid));
  rows.push_back(std::move(first));
  outs.push_back(sample(y, grid));
  for (const auto& op : operators) {
    std::vector<Trajectory> filtered;
    for (const auto& m : reg.regressor) filtered.push_back(apply_operator(op, m, grid));
    rows.push_back(std::move(filtered));
    outs.push_back(apply_operator(op, y, grid));
  }

  ExtendedRegression ext{grid, operators, Eigen::MatrixXd(q, n), {}, Trajectory(grid), Eigen::MatrixXd(q, n)};
  ext.stacked_regressor.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    Matrix me(q, q);
    Eigen::VectorXd ye(q);
    for (Eigen::Index r = 0; r < q; ++r) {
      const auto rs = static_cast<std::size_t>(r);
      ye(r) = outs[rs][ks];
      for (Eigen::Index j = 0; j < q; ++j) me(r, j) = rows[rs][static_cast<std::size_t>(j)][ks];
    }
    ext.stacked_output.col(k) = ye;
    ext.phi[ks] = determinant(me);
    ext.mixed_output.col(k) = adjugate(me) * ye;
    ext.stacked_regressor.push_back(std::move(me));
  }
  return ext;
}

EstimatorRun drem_simulate(const ExtendedRegression& ext, const Eigen::VectorXd& gains,
                           const Eigen::VectorXd& theta_hat0, const std::optional<Eigen::VectorXd>& theta_true) {
  const Eigen::Index q = ext.q();
  if (gains.size() != q || theta_hat0.size() != q) throw DimensionError("drem_simulate: need q gains and q initial estimates");
  for (Eigen::Index i = 0; i < q; ++i)
    if (!(gains(i) > 0.0)) throw std::invalid_argument("drem_simulate: gains must be positive");
  if (theta_true && theta_true->size() != q) throw DimensionError("drem_simulate: theta_true must have q entries");

  std::vector<Trajectory> mixed;
  for (Eigen::Index i = 0; i < q; ++i) mixed.push_back(ext.mixed_row(i));
  const Trajectory& phi = ext.phi;
  const VectorField rhs = [&](double t, const Eigen::VectorXd& th, Eigen::VectorXd& dth) {
    const double ph = phi.smooth_at(t);
    for (Eigen::Index i = 0; i < q; ++i)
      dth(i) = gains(i) * ph * (mixed[static_cast<std::size_t>(i)].smooth_at(t) - ph * th(i));
  };
  StateHistory h = rk4_integrate(rhs, theta_hat0, ext.grid);

  EstimatorRun run{ext.grid, std::move(h.states), std::nullopt, Matrix(gains.asDiagonal()),
                   phi, cumulative_energy(phi), std::nullopt, std::nullopt};
  if (theta_true) run.error = run.estimate.colwise() - *theta_true;
  return run;
}

Eigen::MatrixXd drem_closed_form_error(const Trajectory& phi, const Eigen::VectorXd& gains,
                                       const Eigen::VectorXd& theta_tilde0) {
  if (gains.size() != theta_tilde0.size()) throw DimensionError("drem_closed_form_error: gains and errors differ in length");
  const Trajectory e = cumulative_energy(phi);
  const auto n = static_cast<Eigen::Index>(phi.size());
  Eigen::MatrixXd out(gains.size(), n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < gains.size(); ++i)
      out(i, k) = std::exp(-gains(i) * e[static_cast<std::size_t>(k)]) * theta_tilde0(i);
  return out;
}

}  // namespace dremix

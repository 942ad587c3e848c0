#include "drem/regression_gen.hpp"

#include <stdexcept>

#include "drem/errors.hpp"
#include "drem/rk4.hpp"

namespace dremix {

void ParametrisedSystem::validate(bool need_linearisation) const {
  std::vector<std::string> missing;
  if (n < 1) missing.push_back("state dimension");
  if (q < 1) missing.push_back("parameter dimension");
  if (!f0) missing.push_back("F0");
  if (!f1) missing.push_back("F1");
  if (x_star.size() != n) missing.push_back("operating point of length n");
  if (theta_true.size() != q) missing.push_back("theta_true of length q");
  if (need_linearisation) {
    if (!xi_star) missing.push_back("Xi* evaluator");
    if (!grad_xi_star) missing.push_back("grad Xi* evaluator");
  }
  if (!missing.empty()) {
    std::string msg = "ParametrisedSystem: missing or inconsistent:";
    for (const auto& m : missing) msg += " " + m + ";";
    throw std::invalid_argument(msg);
  }
}

Eigen::MatrixXd simulate_system(const ParametrisedSystem& sys, const Eigen::VectorXd& x0, const TimeGrid& grid) {
  sys.validate(false);
  if (x0.size() != sys.n) throw DimensionError("simulate_system: x0 must have n entries");
  const VectorField rhs = [&](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    dx = sys.f0(x, t) + sys.f1(x, sys.theta_true);
  };
  return rk4_integrate(rhs, x0, grid).states;
}

Eigen::MatrixXd filter_measurements(const ParametrisedSystem& sys, const Eigen::MatrixXd& x, const TimeGrid& grid) {
  sys.validate(false);
  const auto samples = static_cast<Eigen::Index>(grid.size());
  if (x.rows() != sys.n || x.cols() != samples) throw DimensionError("filter_measurements: x must be n x samples");

  // s = x + F0(x) sampled, then z' = -z + s, y = x - z.
  std::vector<Trajectory> s;
  for (Eigen::Index i = 0; i < sys.n; ++i) s.emplace_back(grid);
  for (Eigen::Index k = 0; k < samples; ++k) {
    const Eigen::VectorXd xk = x.col(k);
    const Eigen::VectorXd v = xk + sys.f0(xk, grid.time(static_cast<std::size_t>(k)));
    for (Eigen::Index i = 0; i < sys.n; ++i) s[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = v(i);
  }
  const VectorField rhs = [&](double t, const Eigen::VectorXd& z, Eigen::VectorXd& dz) {
    for (Eigen::Index i = 0; i < sys.n; ++i) dz(i) = -z(i) + s[static_cast<std::size_t>(i)].smooth_at(t);
  };
  const StateHistory z = rk4_integrate(rhs, Eigen::VectorXd::Zero(sys.n), grid);
  return x - z.states;
}

Eigen::MatrixXd Lemma1Regression::residual(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd eta = psi(theta);
  Eigen::MatrixXd r(output.rows(), output.cols());
  for (Eigen::Index k = 0; k < output.cols(); ++k)
    r.col(k) = output.col(k) - regressor[static_cast<std::size_t>(k)] * eta;
  return r;
}

std::vector<Eigen::MatrixXd> Lemma1Regression::regressor_rows() const {
  std::vector<Eigen::MatrixXd> rows(static_cast<std::size_t>(n()), Eigen::MatrixXd(p(), output.cols()));
  for (Eigen::Index k = 0; k < output.cols(); ++k)
    for (Eigen::Index i = 0; i < n(); ++i)
      rows[static_cast<std::size_t>(i)].col(k) = regressor[static_cast<std::size_t>(k)].row(i).transpose();
  return rows;
}

Lemma1Regression lemma1_regression(const ParametrisedSystem& sys, const Eigen::MatrixXd& x, const TimeGrid& grid) {
  sys.validate(true);
  const Eigen::Index n = sys.n, p = n + n * n;
  const Eigen::MatrixXd y = filter_measurements(sys, x, grid);

  std::vector<Matrix> m;
  m.reserve(grid.size());
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const Eigen::VectorXd xt = x.col(k) - sys.x_star;
    Matrix mk = Matrix::Zero(n, p);
    mk.leftCols(n).setIdentity();
    for (Eigen::Index i = 0; i < n; ++i) mk.block(i, n + i * n, 1, n) = xt.transpose();
    m.push_back(std::move(mk));
  }

  const auto xi = sys.xi_star;
  const auto grad = sys.grad_xi_star;
  ParamMap psi(
      "lemma1", sys.q, p,
      [xi, grad, n, p](const Eigen::VectorXd& th) {
        Eigen::VectorXd out(p);
        const Eigen::VectorXd x0 = xi(th);
        const Matrix g = grad(th);
        if (x0.size() != n || g.rows() != n || g.cols() != n)
          throw DimensionError("lemma1_regression: Xi* or grad Xi* has the wrong shape");
        out.head(n) = x0;
        for (Eigen::Index i = 0; i < n; ++i) out.segment(n + i * n, n) = g.col(i);
        return out;
      });
  return Lemma1Regression{grid, std::move(m), y, std::move(psi)};
}

}  // namespace dremix

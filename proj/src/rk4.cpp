#include "drem/rk4.hpp"

#include "drem/errors.hpp"

namespace dremix {

Trajectory StateHistory::row(Eigen::Index i) const {
  std::vector<double> v(static_cast<std::size_t>(states.cols()));
  for (Eigen::Index k = 0; k < states.cols(); ++k) v[static_cast<std::size_t>(k)] = states(i, k);
  return Trajectory(grid, std::move(v));
}

StateHistory rk4_integrate(const VectorField& f, const Eigen::VectorXd& x0, const TimeGrid& grid) {
  const Eigen::Index dim = x0.size();
  const auto n = static_cast<Eigen::Index>(grid.size());
  StateHistory out{grid, Eigen::MatrixXd(dim, n)};
  if (!x0.allFinite()) throw NumericalError("non-finite initial state", 0);
  out.states.col(0) = x0;

  const double h = grid.dt();
  Eigen::VectorXd x = x0, k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double t = grid.time(static_cast<std::size_t>(k));
    f(t, x, k1);
    tmp = x + 0.5 * h * k1;
    f(t + 0.5 * h, tmp, k2);
    tmp = x + 0.5 * h * k2;
    f(t + 0.5 * h, tmp, k3);
    tmp = x + h * k3;
    f(t + h, tmp, k4);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) throw NumericalError("RK4 state became non-finite", static_cast<std::size_t>(k + 1));
    out.states.col(k + 1) = x;
  }
  return out;
}

}  // namespace dremix

#pragma once

#include <functional>

#include <Eigen/Dense>

#include "drem/trajectory.hpp"

namespace dremix {

/// dx = f(t, x). Writes into a pre-sized output vector.
using VectorField = std::function<void(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx)>;

/// States of an integration, one column per grid sample.
struct StateHistory {
  TimeGrid grid;
  Eigen::MatrixXd states;  // dim x n

  Eigen::Index dim() const { return states.rows(); }
  Trajectory row(Eigen::Index i) const;
  Eigen::VectorXd final_state() const { return states.col(states.cols() - 1); }
};

/// Classical fixed-step RK4. Every continuous-time system in the library (filters,
/// estimators, plant models) goes through here. Throws NumericalError naming the
/// first sample whose state is not finite.
StateHistory rk4_integrate(const VectorField& f, const Eigen::VectorXd& x0, const TimeGrid& grid);

}  // namespace dremix

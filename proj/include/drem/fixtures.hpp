#pragma once

#include <Eigen/Dense>

#include "drem/linear_estimation.hpp"
#include "drem/nonlinear_estimation.hpp"
#include "drem/regression_gen.hpp"
#include "drem/signals.hpp"

/// Regressors, operators, maps and systems used by the built-in scenarios, the
/// acceptance suite and the tests.
namespace dremix::fixtures {

/// m = [1, g + g'], g = sin t / sqrt(1 + t). Bounded, not PE, yet DREM with 1/(p+1)
/// yields phi = -g' + transient, which is not square integrable.
LinearRegression non_pe_regression(const Eigen::Vector2d& theta = Eigen::Vector2d(-3.0, 3.0));

/// m = [sin t, cos t]: PE with Gram pi I over any 2 pi window.
LinearRegression sincos_regression(const Eigen::Vector2d& theta = Eigen::Vector2d(1.0, -1.0));

/// m = [1, 0]: rank-one Gram.
LinearRegression rank_one_regression(const Eigen::Vector2d& theta = Eigen::Vector2d(1.0, 1.0));

/// 1/(p+1)
LtiFilter unit_lag();

/// c (p+1) / (p^2 + p + 2): gain c and zero phase at unit frequency.
LtiFilter zero_phase_filter(double c);

/// psi(theta) = [theta - exp(-theta), cos theta]; only the first entry is monotone.
ParamMap scalar_example_map();

/// y = m psi(theta), m = [sin t / sqrt(t + 2 pi), 1], good column 0.
FactorisableRegression scalar_example_regression(double theta = 1.0);

/// psi(theta) = [theta1 - exp(-theta1) + theta2, theta2^3/3 + theta2 + theta1, sin(theta1 theta2)].
/// The first two entries are the monotone part, the third is not.
ParamMap vector_example_map();

/// n = 2, p = 3, q = 2 with m = [[cos t, sin t, 1], [0, 0, 1]]. Filtering row 0 with a
/// pi/2 delay makes the extended regressor's determinant identically 1, so with the
/// orthonormal annihilator det(Phi)^2 = 1/3 at every sample.
FactorisableRegression vector_example_regression(const Eigen::Vector2d& theta = Eigen::Vector2d(0.5, 1.0));

/// Same map as vector_example_regression with slowly varying sinusoidal entries; used to
/// exercise general_reduce with an LTI filter.
FactorisableRegression vector_sinusoid_regression(const Eigen::Vector2d& theta = Eigen::Vector2d(0.5, 1.0));

/// x' = -x^3 + theta sin x + u, scalar, with the constant input u chosen so that the state
/// rests at x_star + offset. Xi*(theta) = theta sin x*, grad Xi* = theta cos x*.
ParametrisedSystem cubic_sine_system(double theta, double x_star, double offset);

/// x' = -x + u(t) + [theta1 sin x2; theta2 tanh x1] around x* = 0. With excite = false
/// the input vanishes and the state regulates to zero; with excite = true two sinusoids
/// keep it moving.
ParametrisedSystem planar_system(const Eigen::Vector2d& theta, bool excite);

}  // namespace dremix::fixtures

#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "drem/trajectory.hpp"

namespace dremix {

/// Closed-form signal of time, evaluable at any real t (delays need t < 0).
/// Value type; composition builds new closures and never mutates operands.
class AnalyticSignal {
 public:
  using Fn = std::function<double(double)>;

  AnalyticSignal(std::string label, Fn fn);

  static AnalyticSignal constant(double c);
  static AnalyticSignal sinusoid(double amplitude, double frequency, double phase = 0.0);
  /// g(t) = sin t / sqrt(1 + t)
  static AnalyticSignal decaying_sinusoid();
  /// dg/dt for decaying_sinusoid().
  static AnalyticSignal decaying_sinusoid_rate();
  /// g + dg/dt: the non-constant entry of the non-PE regressor [1, g + g'].
  static AnalyticSignal non_pe_regressor_entry();
  /// sin t / sqrt(t + 2 pi): first entry of the delay-operator example regressor.
  static AnalyticSignal slow_sine_entry();

  double operator()(double t) const { return fn_(t); }
  const std::string& label() const { return label_; }

  /// s(t - d)
  AnalyticSignal delayed(double d) const;
  AnalyticSignal scaled(double k) const;

  friend AnalyticSignal operator+(const AnalyticSignal& a, const AnalyticSignal& b);
  friend AnalyticSignal operator-(const AnalyticSignal& a, const AnalyticSignal& b);
  friend AnalyticSignal operator*(const AnalyticSignal& a, const AnalyticSignal& b);

 private:
  std::string label_;
  Fn fn_;
};

/// Proper, exponentially stable transfer function num(p)/den(p) in the
/// derivative operator p. Coefficients are in descending powers of p.
/// Realised in controllable canonical form x' = A x + b u, y = c x + d u.
class LtiFilter {
 public:
  LtiFilter(std::vector<double> numerator, std::vector<double> denominator);

  /// alpha / (p + beta)
  static LtiFilter first_order(double alpha, double beta);

  const std::vector<double>& numerator() const { return num_; }
  const std::vector<double>& denominator() const { return den_; }
  Eigen::Index order() const { return a_.rows(); }

  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::RowVectorXd& c() const { return c_; }
  double d() const { return d_; }

  /// Denominator roots.
  const Eigen::VectorXcd& poles() const { return poles_; }
  /// min |Re(pole)|; +inf for a static gain.
  double slowest_decay_rate() const;

 private:
  std::vector<double> num_;
  std::vector<double> den_;
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  Eigen::RowVectorXd c_;
  double d_ = 0.0;
  Eigen::VectorXcd poles_;
};

enum class PreHistory {
  EvaluateAnalytic,  // evaluate the closed form at t - d < t0
  HoldFirstSample,   // use the first sample of a sampled input
};

/// [H u](t) = u(t - d), d >= 0.
struct DelayOperator {
  DelayOperator(double delay, PreHistory policy = PreHistory::EvaluateAnalytic);

  double delay;
  PreHistory policy;
};

using SignalOperator = std::variant<LtiFilter, DelayOperator>;

Trajectory sample(const AnalyticSignal& signal, const TimeGrid& grid);

/// Filter output for a sampled input, zero-input response set by initial_state
/// (empty span means zero state).
Trajectory apply_lti(const LtiFilter& filter, const Trajectory& input,
                     std::span<const double> initial_state = {});

/// Filter output for a closed-form input; RK4 stages evaluate the input exactly.
Trajectory apply_lti(const LtiFilter& filter, const AnalyticSignal& input, const TimeGrid& grid,
                     std::span<const double> initial_state = {});

Trajectory apply_delay(const DelayOperator& op, const AnalyticSignal& input, const TimeGrid& grid);

/// Linear interpolation between input samples. Requires HoldFirstSample.
Trajectory apply_delay(const DelayOperator& op, const Trajectory& input, const TimeGrid& grid);

/// Zero-state application of either operator kind.
Trajectory apply_operator(const SignalOperator& op, const AnalyticSignal& input, const TimeGrid& grid);
Trajectory apply_operator(const SignalOperator& op, const Trajectory& input);

/// Decay rate of the operator's transient; +inf for delays (no transient).
double operator_decay_rate(const SignalOperator& op);

std::string describe(const SignalOperator& op);

}  // namespace dremix

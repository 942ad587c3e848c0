#include "drem/signals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "drem/errors.hpp"
#include "drem/rk4.hpp"

namespace dremix {

// ---------------------------------------------------------------------------
// TimeGrid / Trajectory

TimeGrid::TimeGrid(double t0, double dt, std::size_t n) : t0_(t0), dt_(dt), n_(n) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("TimeGrid: dt must be positive");
  if (n < 2) throw std::invalid_argument("TimeGrid: need at least two samples");
  if (!std::isfinite(t0)) throw std::invalid_argument("TimeGrid: t0 must be finite");
}

TimeGrid TimeGrid::covering(double t0, double t_end, double dt) {
  if (!(t_end > t0)) throw std::invalid_argument("TimeGrid: t_end must exceed t0");
  if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be positive");
  const double steps = std::round((t_end - t0) / dt);
  return TimeGrid(t0, dt, static_cast<std::size_t>(steps) + 1);
}

std::size_t TimeGrid::index_of(double t) const {
  const double s = std::round((t - t0_) / dt_);
  if (s <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(s), n_ - 1);
}

Trajectory::Trajectory(TimeGrid grid) : grid_(grid), values_(grid.size(), 0.0) {}

Trajectory::Trajectory(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw DimensionError("Trajectory: " + std::to_string(values_.size()) + " values for a grid of " +
                         std::to_string(grid_.size()) + " samples");
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (!std::isfinite(values_[k])) throw NumericalError("Trajectory: non-finite value", k);
}

namespace {

// Fractional sample position of t, with a small tolerance at both ends.
double position(const TimeGrid& g, double t) {
  const double s = (t - g.t0()) / g.dt();
  const double last = static_cast<double>(g.size() - 1);
  if (s < -1e-9 || s > last + 1e-9) {
    std::ostringstream os;
    os << "Trajectory: t = " << t << " outside [" << g.t0() << ", " << g.end() << "]";
    throw std::out_of_range(os.str());
  }
  return std::clamp(s, 0.0, last);
}

}  // namespace

double Trajectory::at(double t) const {
  const double s = position(grid_, t);
  const auto k = std::min(static_cast<std::size_t>(s), values_.size() - 2);
  const double w = s - static_cast<double>(k);
  return (1.0 - w) * values_[k] + w * values_[k + 1];
}

double Trajectory::smooth_at(double t) const {
  const double s = position(grid_, t);
  const std::size_t n = values_.size();
  const auto k = std::min(static_cast<std::size_t>(s), n - 2);
  const double w = s - static_cast<double>(k);
  if (w == 0.0) return values_[k];
  if (n < 4) return (1.0 - w) * values_[k] + w * values_[k + 1];
  // Window of four nodes j0..j0+3 containing [k, k+1], shifted inward at the ends.
  const std::size_t j0 = std::clamp<std::size_t>(k == 0 ? 0 : k - 1, 0, n - 4);
  const double x = s - static_cast<double>(j0);
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    double li = 1.0;
    for (int j = 0; j < 4; ++j)
      if (j != i) li *= (x - j) / static_cast<double>(i - j);
    acc += li * values_[j0 + static_cast<std::size_t>(i)];
  }
  return acc;
}

double Trajectory::max_abs() const { return max_abs_from(grid_.t0()); }

double Trajectory::max_abs_from(double t_from) const {
  double m = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (grid_.time(k) >= t_from - 1e-12) m = std::max(m, std::abs(values_[k]));
  return m;
}

// ---------------------------------------------------------------------------
// AnalyticSignal

AnalyticSignal::AnalyticSignal(std::string label, Fn fn) : label_(std::move(label)), fn_(std::move(fn)) {
  if (!fn_) throw std::invalid_argument("AnalyticSignal: empty evaluator");
}

AnalyticSignal AnalyticSignal::constant(double c) {
  std::ostringstream os;
  os << c;
  return {os.str(), [c](double) { return c; }};
}

AnalyticSignal AnalyticSignal::sinusoid(double amplitude, double frequency, double phase) {
  std::ostringstream os;
  os << amplitude << "*sin(" << frequency << "*t+" << phase << ")";
  return {os.str(), [=](double t) { return amplitude * std::sin(frequency * t + phase); }};
}

AnalyticSignal AnalyticSignal::decaying_sinusoid() {
  return {"sin(t)/sqrt(1+t)", [](double t) { return std::sin(t) / std::sqrt(1.0 + t); }};
}

AnalyticSignal AnalyticSignal::decaying_sinusoid_rate() {
  return {"d/dt[sin(t)/sqrt(1+t)]", [](double t) {
            const double s = 1.0 + t;
            return std::cos(t) / std::sqrt(s) - std::sin(t) / (2.0 * s * std::sqrt(s));
          }};
}

AnalyticSignal AnalyticSignal::non_pe_regressor_entry() {
  return {"(sin t+cos t)/sqrt(1+t)-sin t/(2(1+t)^1.5)", [](double t) {
            const double s = 1.0 + t;
            return (std::sin(t) + std::cos(t)) / std::sqrt(s) - std::sin(t) / (2.0 * s * std::sqrt(s));
          }};
}

AnalyticSignal AnalyticSignal::slow_sine_entry() {
  return {"sin(t)/sqrt(t+2pi)",
          [](double t) { return std::sin(t) / std::sqrt(t + 2.0 * std::numbers::pi); }};
}

AnalyticSignal AnalyticSignal::delayed(double d) const {
  return {label_ + "@(t-" + std::to_string(d) + ")", [f = fn_, d](double t) { return f(t - d); }};
}

AnalyticSignal AnalyticSignal::scaled(double k) const {
  return {std::to_string(k) + "*(" + label_ + ")", [f = fn_, k](double t) { return k * f(t); }};
}

AnalyticSignal operator+(const AnalyticSignal& a, const AnalyticSignal& b) {
  return {"(" + a.label_ + ")+(" + b.label_ + ")", [f = a.fn_, g = b.fn_](double t) { return f(t) + g(t); }};
}

AnalyticSignal operator-(const AnalyticSignal& a, const AnalyticSignal& b) {
  return {"(" + a.label_ + ")-(" + b.label_ + ")", [f = a.fn_, g = b.fn_](double t) { return f(t) - g(t); }};
}

AnalyticSignal operator*(const AnalyticSignal& a, const AnalyticSignal& b) {
  return {"(" + a.label_ + ")*(" + b.label_ + ")", [f = a.fn_, g = b.fn_](double t) { return f(t) * g(t); }};
}

Trajectory sample(const AnalyticSignal& signal, const TimeGrid& grid) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = signal(grid.time(k));
    if (!std::isfinite(v[k])) throw NumericalError("sample: '" + signal.label() + "' is not finite", k);
  }
  return Trajectory(grid, std::move(v));
}

// ---------------------------------------------------------------------------
// LtiFilter

namespace {

std::vector<double> strip_leading_zeros(std::vector<double> c) {
  auto it = std::find_if(c.begin(), c.end(), [](double x) { return x != 0.0; });
  c.erase(c.begin(), it);
  return c;
}

}  // namespace

LtiFilter::LtiFilter(std::vector<double> numerator, std::vector<double> denominator)
    : num_(strip_leading_zeros(std::move(numerator))), den_(strip_leading_zeros(std::move(denominator))) {
  if (den_.empty()) throw std::invalid_argument("LtiFilter: zero denominator");
  for (double c : num_)
    if (!std::isfinite(c)) throw std::invalid_argument("LtiFilter: non-finite numerator coefficient");
  for (double c : den_)
    if (!std::isfinite(c)) throw std::invalid_argument("LtiFilter: non-finite denominator coefficient");
  if (num_.size() > den_.size()) throw std::invalid_argument("LtiFilter: improper transfer function");

  const auto n = static_cast<Eigen::Index>(den_.size()) - 1;
  const double lead = den_.front();
  // Monic denominator p^n + a1 p^{n-1} + ... + an and numerator padded to degree n.
  std::vector<double> a(den_.size()), b(den_.size(), 0.0);
  for (std::size_t i = 0; i < den_.size(); ++i) a[i] = den_[i] / lead;
  std::copy(num_.begin(), num_.end(), b.begin() + static_cast<long>(den_.size() - num_.size()));
  for (double& x : b) x /= lead;

  d_ = b[0];
  a_ = Eigen::MatrixXd::Zero(n, n);
  b_ = Eigen::VectorXd::Zero(n);
  c_ = Eigen::RowVectorXd::Zero(n);
  if (n > 0) {
    for (Eigen::Index j = 0; j + 1 < n; ++j) a_(j, j + 1) = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      a_(n - 1, j) = -a[static_cast<std::size_t>(n - j)];
      c_(j) = b[static_cast<std::size_t>(n - j)] - d_ * a[static_cast<std::size_t>(n - j)];
    }
    b_(n - 1) = 1.0;
    poles_ = Eigen::EigenSolver<Eigen::MatrixXd>(a_, false).eigenvalues();
    for (Eigen::Index i = 0; i < poles_.size(); ++i) {
      if (!(poles_(i).real() < 0.0)) {
        std::ostringstream os;
        os << "LtiFilter: unstable or marginal pole " << poles_(i);
        throw std::invalid_argument(os.str());
      }
    }
  }
}

LtiFilter LtiFilter::first_order(double alpha, double beta) {
  if (alpha == 0.0) throw std::invalid_argument("first_order: alpha must be nonzero");
  return LtiFilter({alpha}, {1.0, beta});
}

double LtiFilter::slowest_decay_rate() const {
  double r = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < poles_.size(); ++i) r = std::min(r, -poles_(i).real());
  return r;
}

DelayOperator::DelayOperator(double d, PreHistory p) : delay(d), policy(p) {
  if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("DelayOperator: delay must be >= 0");
}

// ---------------------------------------------------------------------------
// Operator application

namespace {

Eigen::VectorXd initial_filter_state(const LtiFilter& f, std::span<const double> init) {
  if (init.empty()) return Eigen::VectorXd::Zero(f.order());
  if (static_cast<Eigen::Index>(init.size()) != f.order())
    throw DimensionError("apply_lti: initial state has " + std::to_string(init.size()) +
                         " entries, filter order is " + std::to_string(f.order()));
  return Eigen::Map<const Eigen::VectorXd>(init.data(), f.order());
}

template <class Input>
Trajectory run_filter(const LtiFilter& f, const Input& u, const TimeGrid& grid, std::span<const double> init) {
  const Eigen::VectorXd x0 = initial_filter_state(f, init);
  std::vector<double> out(grid.size());
  if (f.order() == 0) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = f.d() * u(grid.time(k));
    return Trajectory(grid, std::move(out));
  }
  const VectorField rhs = [&](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    dx.noalias() = f.a() * x;
    dx += f.b() * u(t);
  };
  const StateHistory h = rk4_integrate(rhs, x0, grid);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = f.c().dot(h.states.col(static_cast<Eigen::Index>(k))) + f.d() * u(grid.time(k));
  return Trajectory(grid, std::move(out));
}

}  // namespace

Trajectory apply_lti(const LtiFilter& filter, const Trajectory& input, std::span<const double> initial_state) {
  return run_filter(filter, [&](double t) { return input.smooth_at(t); }, input.grid(), initial_state);
}

Trajectory apply_lti(const LtiFilter& filter, const AnalyticSignal& input, const TimeGrid& grid,
                     std::span<const double> initial_state) {
  return run_filter(filter, input, grid, initial_state);
}

Trajectory apply_delay(const DelayOperator& op, const AnalyticSignal& input, const TimeGrid& grid) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    double ts = grid.time(k) - op.delay;
    if (op.policy == PreHistory::HoldFirstSample && ts < grid.t0()) ts = grid.t0();
    v[k] = input(ts);
    if (!std::isfinite(v[k])) throw NumericalError("apply_delay: '" + input.label() + "' is not finite", k);
  }
  return Trajectory(grid, std::move(v));
}

Trajectory apply_delay(const DelayOperator& op, const Trajectory& input, const TimeGrid& grid) {
  if (op.policy == PreHistory::EvaluateAnalytic)
    throw std::invalid_argument("apply_delay: sampled input has no closed form for pre-history; use HoldFirstSample");
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double ts = grid.time(k) - op.delay;
    v[k] = ts <= input.grid().t0() ? input[0] : input.at(ts);
  }
  return Trajectory(grid, std::move(v));
}

Trajectory apply_operator(const SignalOperator& op, const AnalyticSignal& input, const TimeGrid& grid) {
  return std::visit(
      [&](const auto& o) -> Trajectory {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, LtiFilter>)
          return apply_lti(o, input, grid);
        else
          return apply_delay(o, input, grid);
      },
      op);
}

Trajectory apply_operator(const SignalOperator& op, const Trajectory& input) {
  return std::visit(
      [&](const auto& o) -> Trajectory {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, LtiFilter>) {
          return apply_lti(o, input);
        } else {
          DelayOperator held(o.delay, PreHistory::HoldFirstSample);
          return apply_delay(held, input, input.grid());
        }
      },
      op);
}

double operator_decay_rate(const SignalOperator& op) {
  if (const auto* f = std::get_if<LtiFilter>(&op)) return f->slowest_decay_rate();
  return std::numeric_limits<double>::infinity();
}

std::string describe(const SignalOperator& op) {
  std::ostringstream os;
  if (const auto* f = std::get_if<LtiFilter>(&op)) {
    os << "lti num=[";
    for (std::size_t i = 0; i < f->numerator().size(); ++i) os << (i ? "," : "") << f->numerator()[i];
    os << "] den=[";
    for (std::size_t i = 0; i < f->denominator().size(); ++i) os << (i ? "," : "") << f->denominator()[i];
    os << "]";
  } else {
    const auto& d = std::get<DelayOperator>(op);
    os << "delay d=" << d.delay;
  }
  return os.str();
}

}  // namespace dremix

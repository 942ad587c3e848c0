#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "drem/linear_estimation.hpp"
#include "drem/matalg.hpp"
#include "drem/nonlinear_estimation.hpp"
#include "drem/regression_gen.hpp"
#include "drem/signals.hpp"

namespace dremix {

enum class ScenarioKind {
  GradientLinear,
  DremLinear,
  OverparamNonlinear,
  DremScalarMonotone,
  DremVectorMonotone,
  Lemma1Demo,
  PeProbe,
};

std::string to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_kind(const std::string& name);

struct GridSpec {
  double t0 = 0.0;
  double dt = 1e-3;
  double t_end = 10.0;

  TimeGrid grid() const { return TimeGrid::covering(t0, t_end, dt); }
};

/// Initial estimates on a circle of the given radius around theta_hat0 (first two
/// components). For q = 1 the points are spread evenly over [c - r, c + r].
struct SweepSpec {
  double radius = 0.0;
  int count = 1;
};

struct MonotoneSpec {
  Matrix p;           // empty means identity
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::size_t samples = 512;
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::DremLinear;
  std::string builtin;                     // regressor or system name
  std::map<std::string, double> params;    // built-in parameters
  std::vector<SignalOperator> operators;
  std::vector<Eigen::Index> filtered_rows;
  Matrix gain;
  Eigen::VectorXd theta_true;              // empty means the built-in default
  Eigen::VectorXd theta_hat0;
  GridSpec grid;
  SweepSpec sweep;
  std::optional<MonotoneSpec> monotone;
  double pe_window = 2.0 * M_PI;
  double transient = 10.0;                 // Lemma1Demo: residual is measured after t0 + transient
  std::size_t output_stride = 1;
  std::string output;                      // CSV path, may be empty
  double tolerance = 1e-3;                 // acceptance tolerance on reported errors
  std::string source;                      // resolved configuration, serialised
};

/// Parse one scenario from JSON text. Collects every problem before throwing
/// ValidationError.
Scenario parse_scenario(const std::string& json_text);

/// A file holds either one scenario object or {"scenarios": [...]}. A bare built-in
/// name is accepted in place of a path.
std::vector<Scenario> load_scenarios(const std::string& path_or_builtin);

struct BuiltinScenario {
  std::string name;
  std::string description;
  std::string json;
};

const std::vector<BuiltinScenario>& builtin_scenarios();
Scenario builtin_scenario(const std::string& name);

/// Names accepted in the "regressor" field.
std::vector<std::string> builtin_regressors();

struct RunRecord {
  std::string scenario;
  std::string config;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, double>> summary;

  /// Final values of the error-like columns (theta_tilde_*, eta_tilde_*, residual_*,
  /// pe_lambda_min), the quantities checked under step refinement.
  std::vector<double> reported_final() const;
  std::optional<double> summary_value(const std::string& key) const;
};

/// One record per initial condition of the sweep (a single record without a sweep).
std::vector<RunRecord> run_scenario(const Scenario& s);

/// Same scenario with the step halved.
Scenario refined(const Scenario& s);

/// Windowed PE metric of the scenario's regressor over its grid.
Trajectory scenario_pe_metric(const Scenario& s);

/// phi (linear DREM) or det(Phi) (monotone kinds) of the scenario.
Trajectory scenario_excitation(const Scenario& s);

}  // namespace dremix

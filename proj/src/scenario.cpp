#include "drem/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "drem/errors.hpp"
#include "drem/fixtures.hpp"

namespace dremix {

using json = nlohmann::json;

namespace {

constexpr ScenarioKind kAllKinds[] = {
    ScenarioKind::GradientLinear,     ScenarioKind::DremLinear,         ScenarioKind::OverparamNonlinear,
    ScenarioKind::DremScalarMonotone, ScenarioKind::DremVectorMonotone, ScenarioKind::Lemma1Demo,
    ScenarioKind::PeProbe,
};

enum class Family { Linear, Factorisable, System };

struct BuiltinInfo {
  Family family;
  Eigen::Index n, p, q;
};

std::optional<BuiltinInfo> builtin_info(const std::string& name) {
  if (name == "non-pe" || name == "sincos" || name == "rank-one") return BuiltinInfo{Family::Linear, 1, 2, 2};
  if (name == "scalar-example") return BuiltinInfo{Family::Factorisable, 1, 2, 1};
  if (name == "vector-example" || name == "vector-sinusoid") return BuiltinInfo{Family::Factorisable, 2, 3, 2};
  if (name == "cubic-sine") return BuiltinInfo{Family::System, 1, 2, 1};
  if (name == "planar") return BuiltinInfo{Family::System, 2, 6, 2};
  return std::nullopt;
}

double param(const Scenario& s, const std::string& key, double fallback) {
  const auto it = s.params.find(key);
  return it == s.params.end() ? fallback : it->second;
}

LinearRegression linear_builtin(const Scenario& s) {
  if (s.builtin == "non-pe") {
    auto r = fixtures::non_pe_regression();
    if (s.theta_true.size()) r.theta_true = s.theta_true;
    return r;
  }
  if (s.builtin == "sincos") {
    auto r = fixtures::sincos_regression();
    if (s.theta_true.size()) r.theta_true = s.theta_true;
    return r;
  }
  auto r = fixtures::rank_one_regression();
  if (s.theta_true.size()) r.theta_true = s.theta_true;
  return r;
}

FactorisableRegression factorisable_builtin(const Scenario& s) {
  if (s.builtin == "scalar-example")
    return fixtures::scalar_example_regression(s.theta_true.size() ? s.theta_true(0) : 1.0);
  const Eigen::Vector2d th = s.theta_true.size() ? Eigen::Vector2d(s.theta_true) : Eigen::Vector2d(0.5, 1.0);
  if (s.builtin == "vector-example") return fixtures::vector_example_regression(th);
  return fixtures::vector_sinusoid_regression(th);
}

ParametrisedSystem system_builtin(const Scenario& s) {
  if (s.builtin == "cubic-sine") {
    const double theta = s.theta_true.size() ? s.theta_true(0) : 1.0;
    return fixtures::cubic_sine_system(theta, param(s, "x_star", 0.5), param(s, "offset", 0.1));
  }
  const Eigen::Vector2d th = s.theta_true.size() ? Eigen::Vector2d(s.theta_true) : Eigen::Vector2d(1.0, 0.5);
  return fixtures::planar_system(th, param(s, "excite", 1.0) != 0.0);
}

// ---------------------------------------------------------------------------
// JSON reading with problem collection

struct Reader {
  const json& j;
  std::vector<std::string>& problems;

  bool has(const char* key) const { return j.contains(key) && !j.at(key).is_null(); }

  std::optional<double> number(const char* key, bool required) const {
    if (!has(key)) {
      if (required) problems.push_back(std::string("missing field '") + key + "'");
      return std::nullopt;
    }
    if (!j.at(key).is_number()) {
      problems.push_back(std::string("field '") + key + "' must be a number");
      return std::nullopt;
    }
    return j.at(key).get<double>();
  }

  std::optional<std::string> string(const char* key, bool required) const {
    if (!has(key)) {
      if (required) problems.push_back(std::string("missing field '") + key + "'");
      return std::nullopt;
    }
    if (!j.at(key).is_string()) {
      problems.push_back(std::string("field '") + key + "' must be a string");
      return std::nullopt;
    }
    return j.at(key).get<std::string>();
  }

  std::optional<Eigen::VectorXd> vector(const char* key, bool required) const {
    if (!has(key)) {
      if (required) problems.push_back(std::string("missing field '") + key + "'");
      return std::nullopt;
    }
    return to_vector(j.at(key), key);
  }

  std::optional<Eigen::VectorXd> to_vector(const json& v, const std::string& what) const {
    if (v.is_number()) return Eigen::VectorXd::Constant(1, v.get<double>());
    if (!v.is_array()) {
      problems.push_back("field '" + what + "' must be an array of numbers");
      return std::nullopt;
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        problems.push_back("field '" + what + "' must be an array of numbers");
        return std::nullopt;
      }
      out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
  }

  // number -> c I, flat array -> diagonal, nested array -> full matrix
  std::optional<Matrix> matrix(const char* key, Eigen::Index dim, bool required) const {
    if (!has(key)) {
      if (required) problems.push_back(std::string("missing field '") + key + "'");
      return std::nullopt;
    }
    const json& v = j.at(key);
    if (v.is_number()) {
      if (dim < 1) return std::nullopt;
      return Matrix(v.get<double>() * Matrix::Identity(dim, dim));
    }
    if (v.is_array() && !v.empty() && v[0].is_array()) {
      const auto rows = static_cast<Eigen::Index>(v.size());
      Matrix m(rows, rows);
      for (std::size_t r = 0; r < v.size(); ++r) {
        if (!v[r].is_array() || v[r].size() != v.size()) {
          problems.push_back(std::string("field '") + key + "' must be a square matrix");
          return std::nullopt;
        }
        for (std::size_t c = 0; c < v.size(); ++c) {
          if (!v[r][c].is_number()) {
            problems.push_back(std::string("field '") + key + "' must contain numbers");
            return std::nullopt;
          }
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v[r][c].get<double>();
        }
      }
      return m;
    }
    const auto d = to_vector(v, key);
    if (!d) return std::nullopt;
    return Matrix(d->asDiagonal());
  }
};

std::optional<SignalOperator> parse_operator(const json& op, std::size_t index, std::vector<std::string>& problems) {
  const std::string where = "operators[" + std::to_string(index) + "]";
  if (!op.is_object() || !op.contains("type") || !op.at("type").is_string()) {
    problems.push_back(where + " needs a string 'type' (\"lti\" or \"delay\")");
    return std::nullopt;
  }
  const std::string type = op.at("type").get<std::string>();
  try {
    if (type == "delay") {
      if (!op.contains("delay") || !op.at("delay").is_number()) {
        problems.push_back(where + " needs a numeric 'delay'");
        return std::nullopt;
      }
      return SignalOperator(DelayOperator(op.at("delay").get<double>()));
    }
    if (type == "lti") {
      if (!op.contains("num") || !op.contains("den") || !op.at("num").is_array() || !op.at("den").is_array()) {
        problems.push_back(where + " needs 'num' and 'den' coefficient arrays");
        return std::nullopt;
      }
      return SignalOperator(LtiFilter(op.at("num").get<std::vector<double>>(), op.at("den").get<std::vector<double>>()));
    }
  } catch (const std::exception& e) {
    problems.push_back(where + ": " + e.what());
    return std::nullopt;
  }
  problems.push_back(where + ": unknown type '" + type + "'");
  return std::nullopt;
}

void check_length(std::vector<std::string>& problems, const std::string& field, Eigen::Index got, Eigen::Index want) {
  if (got != want)
    problems.push_back("field '" + field + "' has " + std::to_string(got) + " entries, expected " + std::to_string(want));
}

Scenario parse_json(const json& j) {
  std::vector<std::string> problems;
  if (!j.is_object()) throw ValidationError({"scenario must be a JSON object"});
  const Reader r{j, problems};
  Scenario s;
  s.source = j.dump();

  if (auto name = r.string("name", true)) s.name = *name;

  std::optional<ScenarioKind> kind;
  if (auto k = r.string("kind", true)) {
    kind = parse_kind(*k);
    if (!kind) problems.push_back("unknown kind '" + *k + "'");
  }
  if (kind) s.kind = *kind;

  const bool is_lemma1 = kind && *kind == ScenarioKind::Lemma1Demo;
  const char* builtin_key = is_lemma1 ? "system" : "regressor";
  std::optional<BuiltinInfo> info;
  if (auto b = r.string(builtin_key, true)) {
    s.builtin = *b;
    info = builtin_info(*b);
    if (!info) problems.push_back("unknown built-in " + std::string(builtin_key) + " '" + *b + "'");
  }
  if (r.has("params")) {
    if (!j.at("params").is_object()) {
      problems.push_back("field 'params' must be an object");
    } else {
      for (const auto& [key, value] : j.at("params").items()) {
        if (value.is_number()) s.params[key] = value.get<double>();
        else if (value.is_boolean()) s.params[key] = value.get<bool>() ? 1.0 : 0.0;
        else problems.push_back("params." + key + " must be a number or boolean");
      }
    }
  }

  if (!r.has("grid") || !j.at("grid").is_object()) {
    problems.push_back("missing object 'grid' with dt and t_end");
  } else {
    const Reader g{j.at("grid"), problems};
    if (auto v = g.number("t0", false)) s.grid.t0 = *v;
    if (auto v = g.number("dt", true)) s.grid.dt = *v;
    if (auto v = g.number("t_end", true)) s.grid.t_end = *v;
    if (!(s.grid.dt > 0.0)) problems.push_back("grid.dt must be positive");
    if (!(s.grid.t_end > s.grid.t0 + s.grid.dt)) problems.push_back("grid.t_end must exceed t0 by at least one step");
  }

  if (r.has("sweep")) {
    if (!j.at("sweep").is_object()) {
      problems.push_back("field 'sweep' must be an object");
    } else {
      const Reader w{j.at("sweep"), problems};
      if (auto v = w.number("radius", true)) s.sweep.radius = *v;
      if (auto v = w.number("count", true)) s.sweep.count = static_cast<int>(*v);
      if (s.sweep.radius < 0.0) problems.push_back("sweep.radius must be non-negative");
      if (s.sweep.count < 1) problems.push_back("sweep.count must be at least 1");
    }
  }

  if (auto v = r.vector("theta_true", false)) s.theta_true = *v;
  if (auto v = r.number("tolerance", false)) s.tolerance = *v;
  if (auto v = r.number("output_stride", false)) {
    if (*v < 1.0) problems.push_back("output_stride must be at least 1");
    else s.output_stride = static_cast<std::size_t>(*v);
  }
  if (auto v = r.string("output", false)) s.output = *v;

  if (r.has("operators")) {
    if (!j.at("operators").is_array()) {
      problems.push_back("field 'operators' must be an array");
    } else {
      for (std::size_t i = 0; i < j.at("operators").size(); ++i)
        if (auto op = parse_operator(j.at("operators")[i], i, problems)) s.operators.push_back(*op);
    }
  }
  if (r.has("filtered_rows")) {
    if (auto v = r.vector("filtered_rows", false))
      for (Eigen::Index i = 0; i < v->size(); ++i) s.filtered_rows.push_back(static_cast<Eigen::Index>((*v)(i)));
  }

  if (!kind || !info) throw ValidationError(problems);

  // Kind-specific requirements.
  const auto want_family = [&](Family f, const char* what) {
    if (info->family != f) problems.push_back("kind " + to_string(*kind) + " needs a " + what + " built-in, got '" + s.builtin + "'");
  };
  const Eigen::Index q = info->q;
  if (s.theta_true.size()) check_length(problems, "theta_true", s.theta_true.size(), q);

  switch (*kind) {
    case ScenarioKind::GradientLinear:
    case ScenarioKind::DremLinear: {
      want_family(Family::Linear, "linear regressor");
      if (auto g = r.matrix("gain", q, true)) s.gain = *g;
      if (auto v = r.vector("theta_hat0", true)) s.theta_hat0 = *v;
      if (s.theta_hat0.size()) check_length(problems, "theta_hat0", s.theta_hat0.size(), q);
      if (s.gain.size()) {
        check_length(problems, "gain", s.gain.rows(), q);
        if (s.gain.rows() == q && !is_positive_definite(s.gain)) problems.push_back("gain must be symmetric positive definite");
      }
      if (*kind == ScenarioKind::DremLinear) {
        if (!r.has("operators")) problems.push_back("missing field 'operators'");
        else check_length(problems, "operators", static_cast<Eigen::Index>(s.operators.size()), q - 1);
      }
      break;
    }
    case ScenarioKind::OverparamNonlinear: {
      want_family(Family::Factorisable, "factorisable regressor");
      const Eigen::Index p = info->p;
      if (auto g = r.matrix("gain", p, true)) s.gain = *g;
      if (auto v = r.vector("theta_hat0", true)) s.theta_hat0 = *v;
      if (s.theta_hat0.size()) check_length(problems, "theta_hat0 (eta_hat0)", s.theta_hat0.size(), p);
      if (s.gain.size()) {
        check_length(problems, "gain", s.gain.rows(), p);
        if (s.gain.rows() == p && !is_positive_definite(s.gain)) problems.push_back("gain must be symmetric positive definite");
      }
      break;
    }
    case ScenarioKind::DremScalarMonotone:
    case ScenarioKind::DremVectorMonotone: {
      want_family(Family::Factorisable, "factorisable regressor");
      const bool scalar = *kind == ScenarioKind::DremScalarMonotone;
      if (info->family == Family::Factorisable) {
        if (scalar && !(info->n == 1 && info->p == 2 && q == 1))
          problems.push_back("DremScalarMonotone needs a (n, p, q) = (1, 2, 1) regressor");
        if (!scalar && q < 2) problems.push_back("DremVectorMonotone needs q >= 2");
      }
      if (auto g = r.matrix("gain", q, true)) s.gain = *g;
      if (auto v = r.vector("theta_hat0", true)) s.theta_hat0 = *v;
      if (s.theta_hat0.size()) check_length(problems, "theta_hat0", s.theta_hat0.size(), q);
      if (s.gain.size()) {
        check_length(problems, "gain", s.gain.rows(), q);
        if (s.gain.rows() == q && !is_positive_definite(s.gain)) problems.push_back("gain must be symmetric positive definite");
      }
      const Eigen::Index want_ops = scalar ? 1 : info->p - info->n;
      if (!r.has("operators")) problems.push_back("missing field 'operators'");
      else check_length(problems, "operators", static_cast<Eigen::Index>(s.operators.size()), want_ops);
      for (const auto row : s.filtered_rows)
        if (row < 0 || row >= info->n) problems.push_back("filtered_rows entries must lie in [0, n)");
      if (!s.filtered_rows.empty()) check_length(problems, "filtered_rows", static_cast<Eigen::Index>(s.filtered_rows.size()), want_ops);

      if (!r.has("monotone") || !j.at("monotone").is_object()) {
        problems.push_back("missing object 'monotone' with the certificate box");
      } else {
        const Reader m{j.at("monotone"), problems};
        MonotoneSpec spec;
        if (auto v = m.vector("lower", true)) spec.lower = *v;
        if (auto v = m.vector("upper", true)) spec.upper = *v;
        if (auto v = m.matrix("P", q, false)) spec.p = *v;
        if (auto v = m.number("samples", false)) spec.samples = static_cast<std::size_t>(std::max(0.0, *v));
        if (spec.lower.size()) check_length(problems, "monotone.lower", spec.lower.size(), q);
        if (spec.upper.size()) check_length(problems, "monotone.upper", spec.upper.size(), q);
        if (spec.lower.size() == q && spec.upper.size() == q && (spec.upper.array() <= spec.lower.array()).any())
          problems.push_back("monotone box needs upper > lower in every coordinate");
        if (spec.p.size()) {
          check_length(problems, "monotone.P", spec.p.rows(), q);
          if (spec.p.rows() == q && !is_positive_definite(spec.p)) problems.push_back("monotone.P must be positive definite");
        }
        s.monotone = spec;
      }
      break;
    }
    case ScenarioKind::Lemma1Demo: {
      want_family(Family::System, "system");
      if (auto v = r.number("transient", false)) s.transient = *v;
      if (auto v = r.vector("x0", false)) {
        s.theta_hat0 = *v;  // initial state is carried here for Lemma1Demo
        check_length(problems, "x0", v->size(), info->n);
      }
      break;
    }
    case ScenarioKind::PeProbe: {
      if (info->family == Family::System) problems.push_back("PeProbe needs a regressor built-in, got a system");
      if (auto v = r.number("window", true)) s.pe_window = *v;
      if (!(s.pe_window > 0.0)) problems.push_back("window must be positive");
      else if (s.pe_window > s.grid.t_end - s.grid.t0) problems.push_back("window is longer than the grid span");
      break;
    }
  }

  if (!problems.empty()) throw ValidationError(problems);
  return s;
}

// ---------------------------------------------------------------------------
// Running

std::vector<Eigen::VectorXd> sweep_points(const Eigen::VectorXd& center, const SweepSpec& sweep) {
  if (sweep.radius == 0.0 || sweep.count <= 1) return {center};
  std::vector<Eigen::VectorXd> pts;
  for (int k = 0; k < sweep.count; ++k) {
    Eigen::VectorXd p = center;
    if (center.size() == 1) {
      p(0) += -sweep.radius + 2.0 * sweep.radius * k / (sweep.count - 1);
    } else {
      const double a = 2.0 * M_PI * k / sweep.count;
      p(0) += sweep.radius * std::cos(a);
      p(1) += sweep.radius * std::sin(a);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

std::vector<std::string> indexed(const std::string& stem, Eigen::Index count) {
  std::vector<std::string> out;
  for (Eigen::Index i = 1; i <= count; ++i) out.push_back(stem + "_" + std::to_string(i));
  return out;
}

std::vector<std::size_t> output_samples(const TimeGrid& grid, std::size_t stride) {
  std::vector<std::size_t> ks;
  for (std::size_t k = 0; k < grid.size(); k += stride) ks.push_back(k);
  if (ks.back() != grid.size() - 1) ks.push_back(grid.size() - 1);
  return ks;
}

RunRecord estimator_record(const Scenario& s, const std::string& name, const EstimatorRun& run, const char* hat,
                           const char* tilde) {
  RunRecord rec{name, s.source, {"t"}, {}, {}};
  const Eigen::Index d = run.dim();
  for (const auto& c : indexed(hat, d)) rec.columns.push_back(c);
  for (const auto& c : indexed(tilde, d)) rec.columns.push_back(c);
  if (run.excitation) {
    rec.columns.push_back("phi");
    rec.columns.push_back("energy");
  }
  if (run.lyapunov) {
    rec.columns.push_back("V");
    rec.columns.push_back("V_bound");
  }
  for (const std::size_t k : output_samples(run.grid, s.output_stride)) {
    const auto kk = static_cast<Eigen::Index>(k);
    std::vector<double> row{run.grid.time(k)};
    for (Eigen::Index i = 0; i < d; ++i) row.push_back(run.estimate(i, kk));
    for (Eigen::Index i = 0; i < d; ++i) row.push_back((*run.error)(i, kk));
    if (run.excitation) {
      row.push_back((*run.excitation)[k]);
      row.push_back((*run.energy)[k]);
    }
    if (run.lyapunov) {
      row.push_back((*run.lyapunov)[k]);
      row.push_back((*run.lyapunov_bound)[k]);
    }
    rec.rows.push_back(std::move(row));
  }

  const Eigen::VectorXd e0 = run.error->col(0);
  const Eigen::VectorXd e1 = run.error->col(run.error->cols() - 1);
  rec.summary.emplace_back("error_norm_initial", e0.norm());
  rec.summary.emplace_back("error_norm_final", e1.norm());
  rec.summary.emplace_back("decay_factor", e0.norm() > 0.0 ? e1.norm() / e0.norm() : 0.0);
  for (Eigen::Index i = 0; i < d; ++i)
    rec.summary.emplace_back("decay_factor_" + std::to_string(i + 1),
                             e0(i) != 0.0 ? std::abs(e1(i)) / std::abs(e0(i)) : 0.0);
  if (run.energy) {
    const double e = run.energy->values().back();
    rec.summary.emplace_back("energy_final", e);
    for (Eigen::Index i = 0; i < d; ++i)
      rec.summary.emplace_back("predicted_decay_" + std::to_string(i + 1), std::exp(-run.gain(i, i) * e));
  }
  if (run.lyapunov) {
    rec.summary.emplace_back("V_final", run.lyapunov->values().back());
    rec.summary.emplace_back("V_bound_final", run.lyapunov_bound->values().back());
  }
  return rec;
}

std::string sweep_name(const Scenario& s, std::size_t i, std::size_t total) {
  return total == 1 ? s.name : s.name + "#" + std::to_string(i);
}

template <typename RunFn>
std::vector<RunRecord> sweep(const Scenario& s, const char* hat, const char* tilde, RunFn&& run_one) {
  const auto pts = sweep_points(s.theta_hat0, s.sweep);
  std::vector<RunRecord> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    out.push_back(estimator_record(s, sweep_name(s, i, pts.size()), run_one(pts[i]), hat, tilde));
  return out;
}

MonotoneCertificate certify(const Scenario& s, const FactorisableRegression& reg) {
  const Eigen::Index q = reg.q();
  const Matrix p = s.monotone->p.size() ? s.monotone->p : Matrix(Matrix::Identity(q, q));
  const MonotoneCheck check = check_monotone(reg.good_map(), p, Box(s.monotone->lower, s.monotone->upper), s.monotone->samples);
  if (const auto* bad = std::get_if<MonotonicityViolation>(&check)) {
    std::ostringstream os;
    os << "monotonicity fails on the box: min eigenvalue " << bad->min_eigenvalue << " at theta = ["
       << bad->theta.transpose() << "]";
    throw ValidationError({os.str()});
  }
  return std::get<MonotoneCertificate>(check);
}

struct Reduction {
  FactorisableRegression reg;
  MonotoneCertificate cert;
  ReducedRegression red;
};

Reduction reduce(const Scenario& s) {
  FactorisableRegression reg = factorisable_builtin(s);
  MonotoneCertificate cert = certify(s, reg);
  const TimeGrid grid = s.grid.grid();
  ReducedRegression red = s.kind == ScenarioKind::DremScalarMonotone
                              ? scalar_reduce(reg, s.operators.at(0), grid)
                              : general_reduce(reg, s.operators, grid, cert, s.filtered_rows);
  return Reduction{std::move(reg), std::move(cert), std::move(red)};
}

Eigen::VectorXd lemma1_x0(const Scenario& s, const ParametrisedSystem& sys) {
  if (s.theta_hat0.size()) return s.theta_hat0;
  if (s.builtin == "cubic-sine") return sys.x_star.array() + param(s, "offset", 0.1);
  return Eigen::Vector2d(0.2, -0.1);
}

std::vector<RunRecord> run_lemma1(const Scenario& s) {
  const ParametrisedSystem sys = system_builtin(s);
  const TimeGrid grid = s.grid.grid();
  const Eigen::MatrixXd x = simulate_system(sys, lemma1_x0(s, sys), grid);
  const Lemma1Regression reg = lemma1_regression(sys, x, grid);
  const Eigen::MatrixXd res = reg.residual(sys.theta_true);
  const Eigen::Index n = sys.n;

  RunRecord rec{s.name, s.source, {"t"}, {}, {}};
  for (const auto& c : indexed("x", n)) rec.columns.push_back(c);
  for (const auto& c : indexed("y", n)) rec.columns.push_back(c);
  for (const auto& c : indexed("residual", n)) rec.columns.push_back(c);
  for (const std::size_t k : output_samples(grid, s.output_stride)) {
    const auto kk = static_cast<Eigen::Index>(k);
    std::vector<double> row{grid.time(k)};
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(x(i, kk));
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(reg.output(i, kk));
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(res(i, kk));
    rec.rows.push_back(std::move(row));
  }
  double res_sup = 0.0, xt_sup = 0.0;
  for (std::size_t k = grid.index_of(grid.t0() + s.transient); k < grid.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    res_sup = std::max(res_sup, res.col(kk).cwiseAbs().maxCoeff());
    xt_sup = std::max(xt_sup, (x.col(kk) - sys.x_star).cwiseAbs().maxCoeff());
  }
  rec.summary.emplace_back("residual_sup", res_sup);
  rec.summary.emplace_back("xtilde_sup", xt_sup);
  rec.summary.emplace_back("remainder_constant", xt_sup > 0.0 ? res_sup / (xt_sup * xt_sup) : 0.0);
  return {rec};
}

std::vector<RunRecord> run_pe_probe(const Scenario& s) {
  const Trajectory pe = scenario_pe_metric(s);
  RunRecord rec{s.name, s.source, {"t", "pe_lambda_min"}, {}, {}};
  for (const std::size_t k : output_samples(pe.grid(), s.output_stride)) rec.rows.push_back({pe.time(k), pe[k]});
  double lo = pe[0], hi = pe[0];
  for (const double v : pe.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  rec.summary.emplace_back("pe_first", pe[0]);
  rec.summary.emplace_back("pe_last", pe.values().back());
  rec.summary.emplace_back("pe_min", lo);
  rec.summary.emplace_back("pe_max", hi);
  return {rec};
}

// Built-in scenario table. Kept as JSON so that built-ins and config files share one parser.
const std::vector<BuiltinScenario> kBuiltins = {
    {"fig1-gradient-gamma3", "gradient estimator on the non-PE regressor, Gamma = 3I, t in [0, 500]",
     R"({"name":"fig1-gradient-gamma3","kind":"GradientLinear","regressor":"non-pe","theta_true":[-3,3],
        "gain":3,"theta_hat0":[0,0],"grid":{"dt":0.01,"t_end":500},"output_stride":10,"tolerance":1e-3})"},
    {"fig1-gradient-gamma10", "gradient estimator on the non-PE regressor, Gamma = 10I, t in [0, 500]",
     R"({"name":"fig1-gradient-gamma10","kind":"GradientLinear","regressor":"non-pe","theta_true":[-3,3],
        "gain":10,"theta_hat0":[0,0],"grid":{"dt":0.01,"t_end":500},"output_stride":10,"tolerance":1e-3})"},
    {"fig2-gradient-disk", "gradient estimator, Gamma = 3I, initial estimates on a circle of radius 2",
     R"({"name":"fig2-gradient-disk","kind":"GradientLinear","regressor":"non-pe","theta_true":[-3,3],
        "gain":3,"theta_hat0":[-3,3],"sweep":{"radius":2,"count":8},"grid":{"dt":0.01,"t_end":100},
        "output_stride":10,"tolerance":1e-3})"},
    {"fig3-drem-gamma3", "DREM with H = 1/(p+1) on the non-PE regressor, gamma = 3, t in [0, 10]",
     R"({"name":"fig3-drem-gamma3","kind":"DremLinear","regressor":"non-pe","theta_true":[-3,3],
        "operators":[{"type":"lti","num":[1],"den":[1,1]}],"gain":3,"theta_hat0":[0,0],
        "grid":{"dt":0.001,"t_end":10},"output_stride":10,"tolerance":1e-3})"},
    {"fig3-drem-gamma10", "DREM with H = 1/(p+1) on the non-PE regressor, gamma = 10, t in [0, 10]",
     R"({"name":"fig3-drem-gamma10","kind":"DremLinear","regressor":"non-pe","theta_true":[-3,3],
        "operators":[{"type":"lti","num":[1],"den":[1,1]}],"gain":10,"theta_hat0":[0,0],
        "grid":{"dt":0.001,"t_end":10},"output_stride":10,"tolerance":1e-3})"},
    {"fig4-overparam-gamma3", "overparameterised gradient on the scalar example, Gamma = diag(3, 3)",
     R"({"name":"fig4-overparam-gamma3","kind":"OverparamNonlinear","regressor":"scalar-example","theta_true":[1],
        "gain":[3,3],"theta_hat0":[0,0],"grid":{"dt":0.01,"t_end":200},"output_stride":10,"tolerance":1e-3})"},
    {"fig4-overparam-gamma50-5", "overparameterised gradient on the scalar example, Gamma = diag(50, 5)",
     R"({"name":"fig4-overparam-gamma50-5","kind":"OverparamNonlinear","regressor":"scalar-example","theta_true":[1],
        "gain":[50,5],"theta_hat0":[0,0],"grid":{"dt":0.005,"t_end":200},"output_stride":20,"tolerance":1e-3})"},
    {"fig5-drem-disk", "DREM, gamma = 3, initial estimates on a circle of radius 2",
     R"({"name":"fig5-drem-disk","kind":"DremLinear","regressor":"non-pe","theta_true":[-3,3],
        "operators":[{"type":"lti","num":[1],"den":[1,1]}],"gain":3,"theta_hat0":[-3,3],
        "sweep":{"radius":2,"count":8},"grid":{"dt":0.001,"t_end":20},"output_stride":10,"tolerance":1e-3})"},
    {"fig6-monotone-scalar", "scalar monotone DREM, delay pi, gamma = 5, theta = 1",
     R"({"name":"fig6-monotone-scalar","kind":"DremScalarMonotone","regressor":"scalar-example","theta_true":[1],
        "operators":[{"type":"delay","delay":3.141592653589793}],"gain":5,"theta_hat0":[0],
        "monotone":{"lower":[-5],"upper":[5],"samples":512},"grid":{"dt":0.001,"t_end":100},
        "output_stride":10,"tolerance":1e-3})"},
    {"vector-monotone", "general reduction (n, p, q) = (2, 3, 2), delay pi/2 on row 0, Gamma = P = I",
     R"({"name":"vector-monotone","kind":"DremVectorMonotone","regressor":"vector-example","theta_true":[0.5,1],
        "operators":[{"type":"delay","delay":1.5707963267948966}],"filtered_rows":[0],"gain":1,
        "theta_hat0":[0.2,0.6],"monotone":{"lower":[0.1,0.5],"upper":[0.6,1.1],"samples":512},
        "grid":{"dt":0.001,"t_end":30},"output_stride":10,"tolerance":1e-3})"},
    {"lemma1-demo", "linearised regression of x' = -x^3 + theta sin x + u around x* = 0.5",
     R"({"name":"lemma1-demo","kind":"Lemma1Demo","system":"cubic-sine","theta_true":[1],
        "params":{"x_star":0.5,"offset":0.1},"transient":20,"grid":{"dt":0.001,"t_end":40},
        "output_stride":10,"tolerance":1e-3})"},
    {"pe-probe", "windowed excitation of the non-PE regressor, window 2 pi, t in [0, 400]",
     R"({"name":"pe-probe","kind":"PeProbe","regressor":"non-pe","window":6.283185307179586,
        "grid":{"dt":0.01,"t_end":400},"output_stride":10,"tolerance":1e-3})"},
    {"zero-phase-sincos", "DREM on [sin t, cos t] with H = 2(p+1)/(p^2+p+2): phi decays and has finite energy",
     R"({"name":"zero-phase-sincos","kind":"DremLinear","regressor":"sincos","theta_true":[1,-1],
        "operators":[{"type":"lti","num":[2,2],"den":[1,1,2]}],"gain":3,"theta_hat0":[0,0],
        "grid":{"dt":0.001,"t_end":400},"output_stride":100,"tolerance":1e-3})"},
};

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::GradientLinear: return "GradientLinear";
    case ScenarioKind::DremLinear: return "DremLinear";
    case ScenarioKind::OverparamNonlinear: return "OverparamNonlinear";
    case ScenarioKind::DremScalarMonotone: return "DremScalarMonotone";
    case ScenarioKind::DremVectorMonotone: return "DremVectorMonotone";
    case ScenarioKind::Lemma1Demo: return "Lemma1Demo";
    case ScenarioKind::PeProbe: return "PeProbe";
  }
  return "?";
}

std::optional<ScenarioKind> parse_kind(const std::string& name) {
  for (const auto k : kAllKinds)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("malformed JSON: ") + e.what()});
  }
  return parse_json(j);
}

std::vector<Scenario> load_scenarios(const std::string& path_or_builtin) {
  if (!std::filesystem::exists(path_or_builtin)) {
    for (const auto& b : kBuiltins)
      if (b.name == path_or_builtin) return {parse_scenario(b.json)};
    throw ValidationError({"no such config file or built-in scenario: " + path_or_builtin});
  }
  std::ifstream in(path_or_builtin);
  if (!in) throw ValidationError({"cannot read " + path_or_builtin});
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ValidationError({path_or_builtin + ": malformed JSON: " + e.what()});
  }
  if (j.is_object() && j.contains("scenarios")) {
    if (!j.at("scenarios").is_array() || j.at("scenarios").empty())
      throw ValidationError({path_or_builtin + ": 'scenarios' must be a non-empty array"});
    std::vector<Scenario> out;
    std::vector<std::string> problems;
    for (std::size_t i = 0; i < j.at("scenarios").size(); ++i) {
      try {
        out.push_back(parse_json(j.at("scenarios")[i]));
      } catch (const ValidationError& e) {
        for (const auto& p : e.problems()) problems.push_back("scenarios[" + std::to_string(i) + "]: " + p);
      }
    }
    if (!problems.empty()) throw ValidationError(problems);
    return out;
  }
  return {parse_json(j)};
}

const std::vector<BuiltinScenario>& builtin_scenarios() { return kBuiltins; }

Scenario builtin_scenario(const std::string& name) {
  for (const auto& b : kBuiltins)
    if (b.name == name) return parse_scenario(b.json);
  throw ValidationError({"unknown built-in scenario '" + name + "'"});
}

std::vector<std::string> builtin_regressors() {
  return {"non-pe", "sincos", "rank-one", "scalar-example", "vector-example", "vector-sinusoid", "cubic-sine", "planar"};
}

std::vector<double> RunRecord::reported_final() const {
  std::vector<double> out;
  if (rows.empty()) return out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const std::string& name = columns[c];
    if (name.starts_with("theta_tilde_") || name.starts_with("eta_tilde_") || name.starts_with("residual_") ||
        name == "pe_lambda_min")
      out.push_back(rows.back()[c]);
  }
  return out;
}

std::optional<double> RunRecord::summary_value(const std::string& key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return v;
  return std::nullopt;
}

std::vector<RunRecord> run_scenario(const Scenario& s) {
  const TimeGrid grid = s.grid.grid();
  switch (s.kind) {
    case ScenarioKind::GradientLinear: {
      const LinearRegression reg = linear_builtin(s);
      return sweep(s, "theta_hat", "theta_tilde",
                   [&](const Eigen::VectorXd& th0) { return gradient_simulate(reg, s.gain, th0, grid); });
    }
    case ScenarioKind::DremLinear: {
      const LinearRegression reg = linear_builtin(s);
      const ExtendedRegression ext = drem_extend(reg, s.operators, grid);
      const Eigen::VectorXd gains = s.gain.diagonal();
      return sweep(s, "theta_hat", "theta_tilde", [&](const Eigen::VectorXd& th0) {
        return drem_simulate(ext, gains, th0, reg.theta_true);
      });
    }
    case ScenarioKind::OverparamNonlinear: {
      const FactorisableRegression reg = factorisable_builtin(s);
      return sweep(s, "eta_hat", "eta_tilde",
                   [&](const Eigen::VectorXd& eta0) { return overparam_gradient(reg, s.gain, eta0, grid); });
    }
    case ScenarioKind::DremScalarMonotone:
    case ScenarioKind::DremVectorMonotone: {
      const Reduction r = reduce(s);
      const ParamMap psi_g = r.reg.good_map();
      auto records = sweep(s, "theta_hat", "theta_tilde", [&](const Eigen::VectorXd& th0) {
        return monotone_estimator(r.red, psi_g, r.cert, s.gain, th0, r.reg.theta_true);
      });
      for (auto& rec : records) {
        rec.summary.emplace_back("rho0", r.cert.rho0);
        rec.summary.emplace_back("rho1", r.cert.rho1);
        rec.summary.emplace_back("skipped_samples", static_cast<double>(r.red.skipped_samples.size()));
      }
      return records;
    }
    case ScenarioKind::Lemma1Demo:
      return run_lemma1(s);
    case ScenarioKind::PeProbe:
      return run_pe_probe(s);
  }
  throw ValidationError({"unhandled scenario kind"});
}

Scenario refined(const Scenario& s) {
  Scenario r = s;
  r.grid.dt = s.grid.dt / 2.0;
  r.output_stride = s.output_stride * 2;
  return r;
}

Trajectory scenario_pe_metric(const Scenario& s) {
  const TimeGrid grid = s.grid.grid();
  const auto info = builtin_info(s.builtin);
  if (!info) throw ValidationError({"unknown built-in '" + s.builtin + "'"});
  switch (info->family) {
    case Family::Linear:
      return pe_metric(linear_builtin(s).regressor, s.pe_window, grid);
    case Family::Factorisable: {
      const FactorisableRegression reg = factorisable_builtin(s);
      std::vector<Eigen::MatrixXd> rows(static_cast<std::size_t>(reg.n()), Eigen::MatrixXd(reg.p(), grid.size()));
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const Matrix m = reg.regressor_at(grid.time(k));
        for (Eigen::Index i = 0; i < reg.n(); ++i)
          rows[static_cast<std::size_t>(i)].col(static_cast<Eigen::Index>(k)) = m.row(i).transpose();
      }
      return pe_metric(rows, s.pe_window, grid);
    }
    case Family::System: {
      const ParametrisedSystem sys = system_builtin(s);
      const Eigen::MatrixXd x = simulate_system(sys, lemma1_x0(s, sys), grid);
      return pe_metric(lemma1_regression(sys, x, grid).regressor_rows(), s.pe_window, grid);
    }
  }
  throw ValidationError({"unhandled regressor family"});
}

Trajectory scenario_excitation(const Scenario& s) {
  switch (s.kind) {
    case ScenarioKind::DremLinear:
      return drem_extend(linear_builtin(s), s.operators, s.grid.grid()).phi;
    case ScenarioKind::DremScalarMonotone:
    case ScenarioKind::DremVectorMonotone:
      return reduce(s).red.det_phi;
    default:
      throw ValidationError({"kind " + to_string(s.kind) + " has no excitation signal (need a DREM kind)"});
  }
}

}  // namespace dremix

#include "drem/nonlinear_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "drem/errors.hpp"
#include "drem/rk4.hpp"

namespace dremix {

// ---------------------------------------------------------------------------
// ParamMap

ParamMap::ParamMap(std::string label, Eigen::Index q, Eigen::Index p, Eval eval, Jac jac)
    : label_(std::move(label)), q_(q), p_(p), eval_(std::move(eval)), jac_(std::move(jac)) {
  if (q_ < 1 || p_ < 1) throw DimensionError("ParamMap: dimensions must be positive");
  if (!eval_) throw std::invalid_argument("ParamMap: missing evaluator");
}

ParamMap ParamMap::identity(Eigen::Index q) {
  return ParamMap(
      "identity", q, q, [](const Eigen::VectorXd& th) { return th; },
      [q](const Eigen::VectorXd&) { return Matrix(Matrix::Identity(q, q)); });
}

ParamMap ParamMap::linear(const Matrix& a) {
  return ParamMap(
      "linear", a.cols(), a.rows(), [a](const Eigen::VectorXd& th) { return Eigen::VectorXd(a * th); },
      [a](const Eigen::VectorXd&) { return a; });
}

Eigen::VectorXd ParamMap::operator()(const Eigen::VectorXd& theta) const {
  if (theta.size() != q_) throw DimensionError("ParamMap '" + label_ + "': wrong parameter dimension");
  Eigen::VectorXd v = eval_(theta);
  if (v.size() != p_) throw DimensionError("ParamMap '" + label_ + "': evaluator returned wrong length");
  return v;
}

Matrix ParamMap::jacobian(const Eigen::VectorXd& theta) const {
  if (!jac_) return finite_difference_jacobian(theta);
  if (theta.size() != q_) throw DimensionError("ParamMap '" + label_ + "': wrong parameter dimension");
  Matrix j = jac_(theta);
  if (j.rows() != p_ || j.cols() != q_) throw DimensionError("ParamMap '" + label_ + "': Jacobian has wrong shape");
  return j;
}

Matrix ParamMap::finite_difference_jacobian(const Eigen::VectorXd& theta) const {
  const double h = 1e-6 * (1.0 + theta.norm());
  Matrix j(p_, q_);
  for (Eigen::Index c = 0; c < q_; ++c) {
    Eigen::VectorXd a = theta, b = theta;
    a(c) += h;
    b(c) -= h;
    j.col(c) = ((*this)(a) - (*this)(b)) / (2.0 * h);
  }
  return j;
}

ParamMap ParamMap::restrict(const std::vector<Eigen::Index>& rows) const {
  for (Eigen::Index r : rows)
    if (r < 0 || r >= p_) throw DimensionError("ParamMap::restrict: component index out of range");
  const auto k = static_cast<Eigen::Index>(rows.size());
  const ParamMap full = *this;
  Eval e = [full, rows, k](const Eigen::VectorXd& th) {
    const Eigen::VectorXd v = full(th);
    Eigen::VectorXd out(k);
    for (Eigen::Index i = 0; i < k; ++i) out(i) = v(rows[static_cast<std::size_t>(i)]);
    return out;
  };
  Jac j;
  if (jac_) {
    j = [full, rows, k](const Eigen::VectorXd& th) {
      const Matrix jf = full.jacobian(th);
      Matrix out(k, jf.cols());
      for (Eigen::Index i = 0; i < k; ++i) out.row(i) = jf.row(rows[static_cast<std::size_t>(i)]);
      return out;
    };
  }
  return ParamMap(label_ + "[restricted]", q_, k, std::move(e), std::move(j));
}

Box::Box(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.size() == 0) throw DimensionError("Box: bounds differ in length");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (!(lower(i) <= upper(i))) throw std::invalid_argument("Box: lower bound exceeds upper bound");
}

bool Box::contains(const Eigen::VectorXd& theta) const {
  return theta.size() == dim() && (theta.array() >= lower.array()).all() && (theta.array() <= upper.array()).all();
}

// ---------------------------------------------------------------------------
// Monotonicity

namespace {

double radical_inverse(std::size_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

MonotoneCheck check_monotone(const ParamMap& psi_g, const Matrix& p, const Box& domain, std::size_t n_samples) {
  const Eigen::Index q = psi_g.q();
  if (psi_g.p() != q) throw DimensionError("check_monotone: psi_g must map R^q to R^q");
  if (p.rows() != q || p.cols() != q) throw DimensionError("check_monotone: P must be q x q");
  if (domain.dim() != q) throw DimensionError("check_monotone: domain dimension differs from q");
  if (q > static_cast<Eigen::Index>(std::size(kPrimes))) throw DimensionError("check_monotone: q too large");
  if (!is_positive_definite(p)) throw std::invalid_argument("check_monotone: P is not positive definite");

  double worst = std::numeric_limits<double>::infinity();
  Eigen::VectorXd witness;
  std::size_t count = 0;
  auto visit = [&](const Eigen::VectorXd& th) {
    const Matrix j = psi_g.jacobian(th);
    const double lam = min_eig_sym(p * j + j.transpose() * p);
    ++count;
    if (lam < worst) {
      worst = lam;
      witness = th;
    }
  };

  const std::size_t vertices = std::size_t{1} << q;
  for (std::size_t v = 0; v < vertices; ++v) {
    Eigen::VectorXd th(q);
    for (Eigen::Index i = 0; i < q; ++i) th(i) = ((v >> i) & 1U) ? domain.upper(i) : domain.lower(i);
    visit(th);
  }
  const Eigen::VectorXd span = domain.upper - domain.lower;
  for (std::size_t s = 1; s <= n_samples; ++s) {
    Eigen::VectorXd th(q);
    for (Eigen::Index i = 0; i < q; ++i) th(i) = domain.lower(i) + span(i) * radical_inverse(s, kPrimes[i]);
    visit(th);
  }

  if (!(worst > 0.0)) return MonotonicityViolation{witness, worst};
  return MonotoneCertificate{q == 1 ? MonotoneKind::ScalarStrong : MonotoneKind::PStrong, p, worst, worst / 2.0,
                             domain, count};
}

// ---------------------------------------------------------------------------
// Factorisable regressions

FactorisableRegression::FactorisableRegression(std::vector<std::vector<AnalyticSignal>> m_, ParamMap psi_,
                                               std::vector<Eigen::Index> good, Eigen::VectorXd theta)
    : m(std::move(m_)), psi(std::move(psi_)), good_indices(std::move(good)), theta_true(std::move(theta)) {
  std::vector<std::string> problems;
  if (m.empty()) problems.push_back("regressor has no rows");
  for (const auto& row : m)
    if (static_cast<Eigen::Index>(row.size()) != psi.p()) {
      problems.push_back("every regressor row needs p = " + std::to_string(psi.p()) + " entries");
      break;
    }
  if (static_cast<Eigen::Index>(good_indices.size()) != psi.q())
    problems.push_back("need exactly q = " + std::to_string(psi.q()) + " good indices");
  std::vector<Eigen::Index> sorted = good_indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) problems.push_back("good indices repeat");
  for (Eigen::Index g : good_indices)
    if (g < 0 || g >= psi.p()) problems.push_back("good index " + std::to_string(g) + " out of range");
  if (theta_true.size() != psi.q()) problems.push_back("theta_true must have q entries");
  if (!(psi.q() < psi.p())) problems.push_back("need q < p (otherwise every component is monotone)");
  if (!(n() < psi.p())) problems.push_back("need n < p (otherwise no operators are required)");
  if (!problems.empty()) {
    std::string msg = "FactorisableRegression:";
    for (const auto& s : problems) msg += " " + s + ";";
    throw DimensionError(msg);
  }
}

std::vector<Eigen::Index> FactorisableRegression::bad_indices() const {
  std::vector<Eigen::Index> bad;
  for (Eigen::Index j = 0; j < p(); ++j)
    if (std::find(good_indices.begin(), good_indices.end(), j) == good_indices.end()) bad.push_back(j);
  return bad;
}

Matrix FactorisableRegression::regressor_at(double t) const {
  Matrix out(n(), p());
  for (Eigen::Index i = 0; i < n(); ++i)
    for (Eigen::Index j = 0; j < p(); ++j) out(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](t);
  return out;
}

std::vector<AnalyticSignal> FactorisableRegression::output() const {
  const Eigen::VectorXd eta = psi(theta_true);
  std::vector<AnalyticSignal> y;
  for (const auto& row : m) {
    AnalyticSignal yi = row[0].scaled(eta(0));
    for (std::size_t j = 1; j < row.size(); ++j) yi = yi + row[j].scaled(eta(static_cast<Eigen::Index>(j)));
    y.push_back(std::move(yi));
  }
  return y;
}

ReducedRegression scalar_reduce(const FactorisableRegression& reg, const SignalOperator& op, const TimeGrid& grid) {
  if (reg.n() != 1 || reg.p() != 2 || reg.q() != 1)
    throw DimensionError("scalar_reduce: need n = 1, p = 2, q = 1");
  const auto g = static_cast<std::size_t>(reg.good_indices[0]);
  const std::size_t b = 1 - g;
  const AnalyticSignal y = reg.output()[0];
  const auto& row = reg.m[0];

  const Trajectory mg = sample(row[g], grid), mb = sample(row[b], grid), ys = sample(y, grid);
  const Trajectory mgf = apply_operator(op, row[g], grid), mbf = apply_operator(op, row[b], grid),
                   yf = apply_operator(op, y, grid);

  const auto n = static_cast<Eigen::Index>(grid.size());
  ReducedRegression red{grid, {}, Eigen::MatrixXd(1, n), Trajectory(grid), {}, operator_decay_rate(op)};
  red.phi.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double phi = mbf[k] * mg[k] - mb[k] * mgf[k];
    red.mixed_output(0, static_cast<Eigen::Index>(k)) = mbf[k] * ys[k] - mb[k] * yf[k];
    red.det_phi[k] = phi;
    red.phi.push_back(Matrix::Constant(1, 1, phi));
  }
  return red;
}

ReducedRegression general_reduce(const FactorisableRegression& reg, const std::vector<SignalOperator>& operators,
                                 const TimeGrid& grid, const MonotoneCertificate& cert,
                                 std::vector<Eigen::Index> filtered_rows) {
  const Eigen::Index n = reg.n(), p = reg.p(), q = reg.q();
  if (static_cast<Eigen::Index>(operators.size()) != p - n)
    throw DimensionError("general_reduce: need p - n = " + std::to_string(p - n) + " operators, got " +
                         std::to_string(operators.size()));
  if (cert.p.rows() != q) throw DimensionError("general_reduce: certificate dimension differs from q");
  if (filtered_rows.empty())
    for (std::size_t i = 0; i < operators.size(); ++i) filtered_rows.push_back(static_cast<Eigen::Index>(i) % n);
  if (filtered_rows.size() != operators.size())
    throw DimensionError("general_reduce: one filtered row per operator");
  for (Eigen::Index r : filtered_rows)
    if (r < 0 || r >= n) throw DimensionError("general_reduce: filtered row out of range");

  // Extended regression rows: the n originals followed by the p - n filtered copies.
  const std::vector<AnalyticSignal> y = reg.output();
  std::vector<std::vector<Trajectory>> rows;
  std::vector<Trajectory> outs;
  for (Eigen::Index r = 0; r < n; ++r) {
    std::vector<Trajectory> row;
    for (const auto& s : reg.m[static_cast<std::size_t>(r)]) row.push_back(sample(s, grid));
    rows.push_back(std::move(row));
    outs.push_back(sample(y[static_cast<std::size_t>(r)], grid));
  }
  double decay = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < operators.size(); ++i) {
    const auto r = static_cast<std::size_t>(filtered_rows[i]);
    std::vector<Trajectory> row;
    for (const auto& s : reg.m[r]) row.push_back(apply_operator(operators[i], s, grid));
    rows.push_back(std::move(row));
    outs.push_back(apply_operator(operators[i], y[r], grid));
    decay = std::min(decay, operator_decay_rate(operators[i]));
  }

  const std::vector<Eigen::Index> good = reg.good_indices, bad = reg.bad_indices();
  const auto samples = static_cast<Eigen::Index>(grid.size());
  ReducedRegression red{grid, {}, Eigen::MatrixXd::Zero(q, samples), Trajectory(grid), {}, decay};
  red.phi.reserve(grid.size());
  Matrix mg(p, q), mb(p, p - q);
  Eigen::VectorXd ye(p);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (Eigen::Index r = 0; r < p; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      for (Eigen::Index j = 0; j < q; ++j) mg(r, j) = row[static_cast<std::size_t>(good[static_cast<std::size_t>(j)])][k];
      for (Eigen::Index j = 0; j < p - q; ++j) mb(r, j) = row[static_cast<std::size_t>(bad[static_cast<std::size_t>(j)])][k];
      ye(r) = outs[static_cast<std::size_t>(r)][k];
    }
    Matrix ann;
    try {
      ann = left_annihilator(mb);
    } catch (const RankDeficient& e) {
      if (e.rank() == 0 && mb.isZero(0.0)) {
        // Nothing to eliminate: any full-rank q x p selector is an annihilator.
        ann = Matrix::Identity(q, p);
      } else {
        red.skipped_samples.push_back(k);
        red.phi.push_back(Matrix::Zero(q, q));
        continue;
      }
    }
    Matrix phi = ann * mg;
    red.det_phi[k] = determinant(phi);
    red.mixed_output.col(static_cast<Eigen::Index>(k)) = adjugate(phi) * (ann * ye);
    red.phi.push_back(std::move(phi));
  }
  return red;
}

// ---------------------------------------------------------------------------
// Estimators

double lyapunov_decay_coefficient(const MonotoneCertificate& cert, const Matrix& gain) {
  return 2.0 * cert.rho1 * min_eig_sym(gain);
}

EstimatorRun monotone_estimator(const ReducedRegression& red, const ParamMap& psi_g, const MonotoneCertificate& cert,
                                const Matrix& gain, const Eigen::VectorXd& theta_hat0,
                                const std::optional<Eigen::VectorXd>& theta_true) {
  const Eigen::Index q = red.q();
  if (psi_g.q() != q || psi_g.p() != q) throw DimensionError("monotone_estimator: psi_g must map R^q to R^q");
  if (cert.p.rows() != q) throw DimensionError("monotone_estimator: certificate dimension differs from q");
  if ((q == 1) != (cert.kind == MonotoneKind::ScalarStrong))
    throw std::invalid_argument("monotone_estimator: certificate kind does not match the dimension");
  if (gain.rows() != q || gain.cols() != q) throw DimensionError("monotone_estimator: gain must be q x q");
  if (!is_positive_definite(gain)) throw std::invalid_argument("monotone_estimator: gain is not positive definite");
  if (theta_hat0.size() != q) throw DimensionError("monotone_estimator: initial estimate must have q entries");
  if (theta_true && theta_true->size() != q) throw DimensionError("monotone_estimator: theta_true must have q entries");

  // The dynamics only see det(Phi) Y and det(Phi)^2, which do not depend on the
  // orientation the annihilator happened to pick at each sample.
  const TimeGrid& grid = red.grid;
  std::vector<Trajectory> drive;
  for (Eigen::Index i = 0; i < q; ++i) {
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = red.det_phi[k] * red.mixed_output(i, static_cast<Eigen::Index>(k));
    drive.emplace_back(grid, std::move(v));
  }
  std::vector<double> sq(grid.size());
  for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = red.det_phi[k] * red.det_phi[k];
  const Trajectory excitation_sq(grid, std::move(sq));

  const Matrix gp = gain * cert.p;
  const VectorField rhs = [&](double t, const Eigen::VectorXd& th, Eigen::VectorXd& dth) {
    Eigen::VectorXd r = -excitation_sq.smooth_at(t) * psi_g(th);
    for (Eigen::Index i = 0; i < q; ++i) r(i) += drive[static_cast<std::size_t>(i)].smooth_at(t);
    dth.noalias() = gp * r;
  };
  StateHistory h = rk4_integrate(rhs, theta_hat0, grid);

  EstimatorRun run{grid, std::move(h.states), std::nullopt, gain, red.det_phi, cumulative_energy(red.det_phi),
                   std::nullopt, std::nullopt};
  if (theta_true) {
    run.error = run.estimate.colwise() - *theta_true;
    const Matrix gain_inv = gain.inverse();
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Eigen::VectorXd e = run.error->col(static_cast<Eigen::Index>(k));
      v[k] = 0.5 * e.dot(gain_inv * e);
    }
    run.lyapunov = Trajectory(grid, std::move(v));
    run.lyapunov_bound = lyapunov_bound(run, cert, gain, red.det_phi).bound;
  }
  return run;
}

LyapunovBound lyapunov_bound(const EstimatorRun& run, const MonotoneCertificate& cert, const Matrix& gain,
                             const Trajectory& det_phi) {
  if (!run.lyapunov) throw std::invalid_argument("lyapunov_bound: run has no Lyapunov trajectory");
  if (!(det_phi.grid() == run.grid)) throw DimensionError("lyapunov_bound: det(Phi) is on a different grid");
  if (gain.rows() != run.dim() || cert.p.rows() != run.dim())
    throw DimensionError("lyapunov_bound: gain or certificate dimension differs from the run");

  const double c = lyapunov_decay_coefficient(cert, gain);
  const Trajectory energy = cumulative_energy(det_phi);
  const double v0 = (*run.lyapunov)[0];
  std::vector<double> b(run.grid.size());
  double kappa = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < b.size(); ++k) {
    b[k] = std::exp(-c * energy[k]) * v0;
    kappa = std::min(kappa, det_phi[k] * det_phi[k]);
  }
  LyapunovBound out{Trajectory(run.grid, std::move(b)), kappa, std::nullopt};
  if (kappa > 0.0) out.exponential_rate = c * kappa;
  return out;
}

EstimatorRun overparam_gradient(const FactorisableRegression& reg, const Matrix& gain, const Eigen::VectorXd& eta_hat0,
                                const TimeGrid& grid) {
  const Eigen::Index p = reg.p();
  if (gain.rows() != p || gain.cols() != p) throw DimensionError("overparam_gradient: gain must be p x p");
  if (eta_hat0.size() != p) throw DimensionError("overparam_gradient: initial estimate must have p entries");
  if (!is_positive_definite(gain)) throw std::invalid_argument("overparam_gradient: gain is not positive definite");

  const std::vector<AnalyticSignal> y = reg.output();
  const VectorField rhs = [&](double t, const Eigen::VectorXd& eta, Eigen::VectorXd& deta) {
    const Matrix m = reg.regressor_at(t);
    Eigen::VectorXd yt(reg.n());
    for (Eigen::Index i = 0; i < reg.n(); ++i) yt(i) = y[static_cast<std::size_t>(i)](t);
    deta.noalias() = gain * (m.transpose() * (yt - m * eta));
  };
  StateHistory h = rk4_integrate(rhs, eta_hat0, grid);
  EstimatorRun run{grid, std::move(h.states), std::nullopt, gain, {}, {}, {}, {}};
  run.error = run.estimate.colwise() - reg.psi(reg.theta_true);
  return run;
}

}  // namespace dremix

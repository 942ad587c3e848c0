#include "drem/matalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "drem/errors.hpp"

namespace dremix {

namespace {

void require_square(const Matrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << who << ": expected a square matrix, got " << a.rows() << "x" << a.cols();
    throw DimensionError(os.str());
  }
  if (a.rows() > kMaxKernelSize) {
    std::ostringstream os;
    os << who << ": size " << a.rows() << " exceeds the kernel cap of " << kMaxKernelSize;
    throw DimensionError(os.str());
  }
}

}  // namespace

double determinant(const Matrix& a) {
  require_square(a, "determinant");
  const Eigen::Index n = a.rows();
  if (n == 0) return 1.0;
  Matrix lu = a;
  double det = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    lu.col(k).tail(n - k).cwiseAbs().maxCoeff(&p);
    p += k;
    if (lu(p, k) == 0.0) return 0.0;
    if (p != k) {
      lu.row(p).swap(lu.row(k));
      det = -det;
    }
    det *= lu(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      lu.row(i).tail(n - k - 1) -= f * lu.row(k).tail(n - k - 1);
    }
  }
  return det;
}

Matrix adjugate(const Matrix& a) {
  require_square(a, "adjugate");
  const Eigen::Index n = a.rows();
  if (n == 0) return Matrix(0, 0);
  // M_0 = 0, c_n = 1;  M_k = A M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(A M_k) / k.
  // Then adj(A) = (-1)^{n-1} M_n.
  const Matrix id = Matrix::Identity(n, n);
  Matrix m = Matrix::Zero(n, n);
  double c = 1.0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c * id;
    c = -(a * m).trace() / static_cast<double>(k);
  }
  return (n % 2 == 1) ? m : Matrix(-m);
}

Matrix left_annihilator(const Matrix& b) {
  const Eigen::Index r = b.rows(), c = b.cols();
  if (r <= c) {
    std::ostringstream os;
    os << "left_annihilator: need a tall matrix, got " << r << "x" << c;
    throw DimensionError(os.str());
  }
  const double tol = 1e-10 * b.norm();
  Eigen::ColPivHouseholderQR<Matrix> qr(b);
  const Matrix& rr = qr.matrixQR();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < c; ++i)
    if (std::abs(rr(i, i)) > tol) ++rank;
  if (rank < c || b.norm() == 0.0) throw RankDeficient(rank);

  const Matrix q = qr.householderQ() * Matrix::Identity(r, r);
  Matrix n = q.rightCols(r - c).transpose();
  for (Eigen::Index i = 0; i < n.rows(); ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      if (std::abs(n(i, j)) > 1e-12) {
        if (n(i, j) < 0.0) n.row(i) *= -1.0;
        break;
      }
    }
  }
  return n;
}

Eigen::VectorXd eig_sym(const Matrix& s) {
  require_square(s, "eig_sym");
  const Eigen::Index n = s.rows();
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("eig_sym: matrix is not symmetric");
  Matrix a = 0.5 * (s + s.transpose());

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off <= 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        // Rotation zeroing a(p, q).
        const double tau = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * cs;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = cs * akp - sn * akq;
          a(k, q) = sn * akp + cs * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = cs * apk - sn * aqk;
          a(q, k) = sn * apk + cs * aqk;
        }
      }
    }
  }
  Eigen::VectorXd ev = a.diagonal();
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

double min_eig_sym(const Matrix& s) {
  if (s.rows() == 0) throw DimensionError("min_eig_sym: empty matrix");
  return eig_sym(s)(0);
}

double max_eig_sym(const Matrix& s) {
  if (s.rows() == 0) throw DimensionError("max_eig_sym: empty matrix");
  const Eigen::VectorXd ev = eig_sym(s);
  return ev(ev.size() - 1);
}

bool is_positive_definite(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() == 0) return false;
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) return false;
  return min_eig_sym(s) > 0.0;
}

double l2_energy(const Trajectory& x, double t_a, double t_b) {
  const TimeGrid& g = x.grid();
  const double slack = 1e-9 * g.dt();
  if (t_a < g.t0() - slack || t_b > g.end() + slack || t_a > t_b) {
    std::ostringstream os;
    os << "l2_energy: interval [" << t_a << ", " << t_b << "] outside grid [" << g.t0() << ", " << g.end() << "]";
    throw std::out_of_range(os.str());
  }
  t_a = std::clamp(t_a, g.t0(), g.end());
  t_b = std::clamp(t_b, g.t0(), g.end());
  if (t_a == t_b) return 0.0;

  // Sample indices strictly inside (t_a, t_b), with the endpoints interpolated.
  const double sa = (t_a - g.t0()) / g.dt(), sb = (t_b - g.t0()) / g.dt();
  const auto first = static_cast<std::size_t>(std::floor(sa + 1e-9)) + 1;
  const auto last = static_cast<std::size_t>(std::ceil(sb - 1e-9));  // exclusive

  double prev_t = t_a, prev_v = x.at(t_a);
  double sum = 0.0;
  for (std::size_t k = first; k < last; ++k) {
    const double tk = g.time(k), vk = x[k];
    sum += 0.5 * (tk - prev_t) * (prev_v * prev_v + vk * vk);
    prev_t = tk;
    prev_v = vk;
  }
  const double vb = x.at(t_b);
  sum += 0.5 * (t_b - prev_t) * (prev_v * prev_v + vb * vb);
  return sum;
}

Trajectory cumulative_energy(const Trajectory& x) {
  std::vector<double> e(x.size(), 0.0);
  const double h = x.grid().dt();
  for (std::size_t k = 1; k < e.size(); ++k) e[k] = e[k - 1] + 0.5 * h * (x[k - 1] * x[k - 1] + x[k] * x[k]);
  return Trajectory(x.grid(), std::move(e));
}

}  // namespace dremix

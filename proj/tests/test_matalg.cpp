#include <doctest.h>

#include <cmath>
#include <random>

#include "drem/errors.hpp"
#include "drem/matalg.hpp"
#include "oracles.hpp"

using namespace dremix;

TEST_CASE("determinant matches cofactor expansion") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 600; ++trial) {
    const Eigen::Index n = 1 + trial % 6;
    const Matrix a = oracle::random_matrix(rng, n, n, 3.0);
    const double ref = oracle::cofactor_det(a);
    CHECK(std::abs(determinant(a) - ref) <= 1e-11 * (1.0 + std::abs(ref)) * std::pow(3.0, n));
  }
  CHECK(determinant(Matrix::Zero(3, 3)) == 0.0);
  Matrix perm = Matrix::Zero(3, 3);
  perm << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  CHECK(determinant(perm) == doctest::Approx(1.0));
  CHECK_THROWS_AS(determinant(Matrix::Zero(2, 3)), DimensionError);
  CHECK_THROWS_AS(determinant(Matrix::Identity(kMaxKernelSize + 1, kMaxKernelSize + 1)), DimensionError);
}

TEST_CASE("adjugate matches cofactor oracle") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 600; ++trial) {
    const Eigen::Index n = 1 + trial % 6;
    Matrix a = oracle::random_matrix(rng, n, n, 2.0);
    if (trial % 3 == 0 && n > 1) a.col(n - 1) = 0.5 * a.col(0) - a.col(n > 2 ? 1 : 0) * 0.25;  // singular
    const Matrix ref = oracle::cofactor_adjugate(a);
    CHECK((adjugate(a) - ref).cwiseAbs().maxCoeff() <= 1e-10 * std::pow(1.0 + a.cwiseAbs().maxCoeff(), n));
  }
}

TEST_CASE("adjugate closed forms") {
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  Matrix expect(2, 2);
  expect << 4, -2, -3, 1;
  CHECK((adjugate(a) - expect).norm() < 1e-14);
  CHECK(adjugate(Matrix::Constant(1, 1, 7.0))(0, 0) == 1.0);

  // rank one: the adjugate of a rank n-1 matrix is nonzero, of lower rank it vanishes
  Matrix r1(2, 2);
  r1 << 1, 2, 2, 4;
  Matrix e1(2, 2);
  e1 << 4, -2, -2, 1;
  CHECK((adjugate(r1) - e1).norm() < 1e-14);
  Matrix r3 = Eigen::Vector3d(1, 2, 3) * Eigen::RowVector3d(1, -1, 2);
  CHECK(adjugate(r3).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("adjugate identity property on random singular and regular matrices") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> scale(0.1, 5.0);
  int checked = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const Eigen::Index n = 1 + trial % 6;
    Matrix a = oracle::random_matrix(rng, n, n, scale(rng));
    if (trial % 2) {
      if (n == 1) a(0, 0) = 0.0;
      else a.row(trial % n) = a.row((trial + 1) % n) * 0.75;
    }
    const Matrix id = Matrix::Identity(n, n);
    const double tol = 1e-8 * std::pow(1.0 + a.cwiseAbs().maxCoeff(), n);
    const Matrix adj = adjugate(a);
    const double d = determinant(a);
    CHECK((adj * a - d * id).cwiseAbs().maxCoeff() <= tol);
    CHECK((a * adj - d * id).cwiseAbs().maxCoeff() <= tol);
    ++checked;
  }
  CHECK(checked == 10000);
}

TEST_CASE("left annihilator against an svd null space") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index c = 1 + trial % 3;
    const Eigen::Index r = c + 1 + trial % 3;
    const Matrix b = oracle::random_matrix(rng, r, c, 2.0);
    const Matrix n = left_annihilator(b);
    REQUIRE(n.rows() == r - c);
    REQUIRE(n.cols() == r);
    CHECK((n * b).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((n * n.transpose() - Matrix::Identity(r - c, r - c)).cwiseAbs().maxCoeff() < 1e-12);

    // same row space as the trailing left singular vectors
    Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU);
    const Matrix u_null = svd.matrixU().rightCols(r - c).transpose();
    const Matrix proj = n.transpose() * n;
    const Matrix proj_ref = u_null.transpose() * u_null;
    CHECK((proj - proj_ref).cwiseAbs().maxCoeff() < 1e-10);

    // sign convention
    for (Eigen::Index i = 0; i < n.rows(); ++i) {
      Eigen::Index j = 0;
      while (std::abs(n(i, j)) <= 1e-12) ++j;
      CHECK(n(i, j) > 0.0);
    }
  }
}

TEST_CASE("left annihilator errors") {
  Matrix b(3, 2);
  b << 1, 2, 2, 4, 3, 6;
  try {
    left_annihilator(b);
    FAIL("expected RankDeficient");
  } catch (const RankDeficient& e) {
    CHECK(e.rank() == 1);
  }
  CHECK_THROWS_AS(left_annihilator(Matrix::Zero(3, 1)), RankDeficient);
  CHECK_THROWS_AS(left_annihilator(Matrix::Identity(2, 2)), DimensionError);
  CHECK_THROWS_AS(left_annihilator(Matrix::Ones(2, 3)), DimensionError);

  const Matrix col = Eigen::Vector2d(0.0, -3.0);
  const Matrix n = left_annihilator(col);
  CHECK(n(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(n(0, 1)) < 1e-15);
}

TEST_CASE("symmetric eigenvalues") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + trial % 7;
    const Matrix a = oracle::random_matrix(rng, n, n, 2.0);
    const Matrix s = a + a.transpose();
    const Eigen::VectorXd ev = eig_sym(s);
    for (Eigen::Index i = 1; i < n; ++i) CHECK(ev(i) >= ev(i - 1));
    // each eigenvalue is a root of the characteristic polynomial and the trace is preserved
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ch = oracle::cofactor_det(s - ev(i) * Matrix::Identity(n, n));
      CHECK(std::abs(ch) <= 1e-8 * std::pow(1.0 + s.cwiseAbs().maxCoeff() * n, n));
    }
    CHECK(ev.sum() == doctest::Approx(s.trace()).epsilon(1e-10).scale(1.0));
    Eigen::SelfAdjointEigenSolver<Matrix> ref(s);
    CHECK((ev - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(min_eig_sym(s) == doctest::Approx(ev(0)));
    CHECK(max_eig_sym(s) == doctest::Approx(ev(n - 1)));
  }
  Matrix ns(2, 2);
  ns << 1, 2, 0, 1;
  CHECK_THROWS_AS(eig_sym(ns), std::invalid_argument);
  CHECK(is_positive_definite(Matrix::Identity(3, 3)));
  CHECK_FALSE(is_positive_definite(Matrix::Zero(2, 2)));
  CHECK_FALSE(is_positive_definite(ns));
  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  CHECK_FALSE(is_positive_definite(indefinite));
}

TEST_CASE("l2 energy") {
  const TimeGrid g = TimeGrid::covering(0.0, 10.0, 0.01);
  const Trajectory c(g, std::vector<double>(g.size(), 2.0));
  CHECK(l2_energy(c, 0.0, 10.0) == doctest::Approx(40.0).epsilon(1e-13));
  CHECK(l2_energy(c, 1.234, 5.678) == doctest::Approx(4.0 * (5.678 - 1.234)).epsilon(1e-12));
  CHECK(l2_energy(c, 3.0, 3.0) == 0.0);

  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = g.time(k);
  const Trajectory x(g, v);
  // trapezoid of t^2 with piecewise-linear x: error bounded by (b - a) dt^2 / 6
  const double a = 0.333, b = 7.777;
  CHECK(std::abs(l2_energy(x, a, b) - (b * b * b - a * a * a) / 3.0) <= (b - a) * 1e-4 / 6.0 + 1e-12);

  const Trajectory cum = cumulative_energy(x);
  CHECK(cum[0] == 0.0);
  CHECK(cum[g.size() - 1] == doctest::Approx(l2_energy(x, 0.0, 10.0)).epsilon(1e-13));
  CHECK(cum[500] == doctest::Approx(l2_energy(x, 0.0, 5.0)).epsilon(1e-13));

  CHECK_THROWS_AS(l2_energy(x, -1.0, 2.0), std::out_of_range);
  CHECK_THROWS_AS(l2_energy(x, 2.0, 11.0), std::out_of_range);
  CHECK_THROWS_AS(l2_energy(x, 3.0, 2.0), std::out_of_range);
}

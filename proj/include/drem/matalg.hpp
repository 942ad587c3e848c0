#pragma once

#include <Eigen/Dense>

#include "drem/trajectory.hpp"

namespace dremix {

using Matrix = Eigen::MatrixXd;

/// Largest square size the kernels accept.
inline constexpr Eigen::Index kMaxKernelSize = 12;

/// LU with partial pivoting.
double determinant(const Matrix& a);

/// Transposed cofactor matrix via the Faddeev-LeVerrier recurrence. No inversion is
/// involved, so adjugate(a) * a == determinant(a) * I holds for singular a as well.
Matrix adjugate(const Matrix& a);

/// Orthonormal N ((r - c) x r) with N * b == 0, for a tall b (r > c) of full column rank.
/// Rank is decided with tolerance 1e-10 * ||b||_F; each row is signed so that its
/// first non-negligible entry is positive. Throws RankDeficient otherwise.
Matrix left_annihilator(const Matrix& b);

/// All eigenvalues of a symmetric matrix, ascending (cyclic Jacobi).
Eigen::VectorXd eig_sym(const Matrix& s);

/// Smallest eigenvalue of a symmetric matrix. Input is symmetrised first.
double min_eig_sym(const Matrix& s);
double max_eig_sym(const Matrix& s);

/// True when s is symmetric within 1e-10 * ||s|| and its smallest eigenvalue is positive.
bool is_positive_definite(const Matrix& s);

/// Trapezoidal integral of x^2 over [t_a, t_b]; endpoints may fall between samples.
double l2_energy(const Trajectory& x, double t_a, double t_b);

/// Running integral of x^2 from the start of the grid (trapezoidal).
Trajectory cumulative_energy(const Trajectory& x);

}  // namespace dremix

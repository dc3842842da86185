#pragma once

#include <Eigen/Dense>

namespace imc::linalg {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

struct EigenSystem {
    VectorXd values;  // ascending
    MatrixXd vectors; // column k pairs with values[k]
};

[[nodiscard]] bool is_symmetric(const MatrixXd& m, double tol = 1e-12);

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Sweeps until the off-diagonal Frobenius norm drops below
/// tol * max(1, ||A||_F). Intended for the small dense matrices this
/// project works with (N <= ~64).
EigenSystem jacobi_eigen(const MatrixXd& sym, double tol = 1e-12, int max_sweeps = 128);

double min_eigenvalue(const MatrixXd& sym);
double max_eigenvalue(const MatrixXd& sym);

/// Spectral norm of a symmetric positive semidefinite matrix.
double spectral_norm_spd(const MatrixXd& sym);

/// Solves A^T X + X A + Q = 0 for symmetric Q via Kronecker vectorization
/// and a dense LU. Requires A Hurwitz (unique solution); throws otherwise.
MatrixXd solve_lyapunov(const MatrixXd& a, const MatrixXd& q);

} // namespace imc::linalg

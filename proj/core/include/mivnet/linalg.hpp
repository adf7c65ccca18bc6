// linalg.hpp — minimum-norm least-squares solves shared by the solvers.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace mivnet {

// Minimum-norm least-squares solution of A x = b: dense complete orthogonal
// decomposition up to `dense_limit` unknowns, LSMR above it. For consistent
// systems both return the minimum-norm solution.
Eigen::VectorXd minimum_norm_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                                   int dense_limit = 3000);

// LSMR (Fong & Saunders). Returns the iterate when the normal-equation
// residual ||A'r|| / (||A||_F ||r||) drops below `tol` or after maxiter.
Eigen::VectorXd lsmr(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, double tol = 1e-14,
                     int maxiter = 0);

}  // namespace mivnet

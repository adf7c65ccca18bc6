#include "mivnet/linalg.hpp"

#include <cmath>

namespace mivnet {

Eigen::VectorXd lsmr(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, double tol,
                     int maxiter) {
  const Eigen::Index m = A.rows(), n = A.cols();
  if (maxiter <= 0) maxiter = static_cast<int>(4 * (m + n));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);

  // Golub-Kahan bidiagonalization
  double beta = b.norm();
  if (beta == 0.0) return x;
  Eigen::VectorXd u = b / beta;
  Eigen::VectorXd v = A.transpose() * u;
  double alpha = v.norm();
  if (alpha == 0.0) return x;
  v /= alpha;

  // LSMR state
  double alpha_bar = alpha, zeta_bar = alpha * beta;
  double rho = 1.0, rho_bar = 1.0, c_bar = 1.0, s_bar = 0.0;
  Eigen::VectorXd h = v, h_bar = Eigen::VectorXd::Zero(n);

  // residual-norm estimation state (as in the reference implementation)
  double beta_dd = beta, beta_d = 0.0, rho_d_old = 1.0, tau_tilde_old = 0.0;
  double theta_tilde = 0.0, zeta = 0.0, d = 0.0;
  double norm_A2 = alpha * alpha;

  for (int it = 0; it < maxiter; ++it) {
    u = A * v - alpha * u;
    beta = u.norm();
    if (beta > 0.0) {
      u /= beta;
      v = A.transpose() * u - beta * v;
      alpha = v.norm();
      if (alpha > 0.0) v /= alpha;
    } else {
      alpha = 0.0;
    }
    norm_A2 += beta * beta + alpha * alpha;

    // rotation P to eliminate beta
    const double rho_old = rho;
    rho = std::hypot(alpha_bar, beta);
    const double c = alpha_bar / rho;
    const double s = beta / rho;
    const double theta_new = s * alpha;
    alpha_bar = c * alpha;

    // rotation P-bar
    const double rho_bar_old = rho_bar;
    const double zeta_old = zeta;
    const double theta_bar = s_bar * rho;
    rho_bar = std::hypot(c_bar * rho, theta_new);
    c_bar = c_bar * rho / rho_bar;
    s_bar = theta_new / rho_bar;
    zeta = c_bar * zeta_bar;
    zeta_bar = -s_bar * zeta_bar;

    // update solution
    h_bar = h - (theta_bar * rho / (rho_old * rho_bar_old)) * h_bar;
    x += (zeta / (rho * rho_bar)) * h_bar;
    h = v - (theta_new / rho) * h;

    // estimate ||r||
    const double beta_acute = c * beta_dd;
    const double beta_check = -s * beta_dd;
    const double beta_hat = c_bar * beta_acute;
    beta_dd = -s_bar * beta_acute;
    const double theta_tilde_old = theta_tilde;
    const double rho_tilde_old = std::hypot(rho_d_old, theta_bar);
    const double c_tilde_old = rho_d_old / rho_tilde_old;
    const double s_tilde_old = theta_bar / rho_tilde_old;
    theta_tilde = s_tilde_old * rho_bar;
    rho_d_old = c_tilde_old * rho_bar;
    beta_d = -s_tilde_old * beta_d + c_tilde_old * beta_hat;
    tau_tilde_old = (zeta_old - theta_tilde_old * tau_tilde_old) / rho_tilde_old;
    const double tau_d = (zeta - theta_tilde * tau_tilde_old) / rho_d_old;
    d += beta_check * beta_check;
    const double norm_r = std::sqrt(d + (beta_d - tau_d) * (beta_d - tau_d) + beta_dd * beta_dd);

    const double norm_Ar = std::abs(zeta_bar);  // ||A' r||
    const double norm_A = std::sqrt(norm_A2);
    if (norm_Ar <= tol * norm_A * norm_r || norm_Ar <= 1e-300) break;
  }
  return x;
}

Eigen::VectorXd minimum_norm_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                                   int dense_limit) {
  if (A.rows() <= dense_limit && A.cols() <= dense_limit) {
    Eigen::MatrixXd dense(A);
    return dense.completeOrthogonalDecomposition().solve(b);
  }
  return lsmr(A, b);
}

}  // namespace mivnet

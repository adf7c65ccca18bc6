// prior.hpp — prior covariance specifications over outcome parameters and
// assembly of the per-allocation outcome covariance Sigma(z).
//
// Only mean-zero priors are represented: the minimum-integrated-variance
// weights depend on the prior through its covariance alone, and nonzero
// means reduce to the mean-zero problem by shifting the observed outcomes.
#pragma once

#include <Eigen/Dense>
#include <string>

#include "mivnet/design.hpp"
#include "mivnet/graph.hpp"
#include "mivnet/outcome.hpp"

namespace mivnet {

struct WeightScheme;  // estimators.hpp

enum class PriorKind {
  sutva_uncorrelated,
  sutva_constant,
  sania_uncorrelated,
  sania_constant,
  sanasia_independent,
  custom,  // per-family blocks, diagonal across units, entries free
};

PriorKind parse_prior_kind(const std::string& name);
std::string prior_kind_name(PriorKind k);

// Covariance blocks by kind:
//   *_uncorrelated / custom   per-unit variances s2_alpha, s2_beta, within-
//                             unit cross cov_ab, and degree-indexed
//                             interference variances s2_gamma(i,d) (column 0
//                             is identically 0 since Gamma_i(0) = 0), plus
//                             optional s2_delta and alpha/beta-Gamma crosses.
//   *_constant                parameters equal across units; const_block is
//                             the symmetric covariance over
//                             [alpha, beta, Gamma(1), ..., Gamma(D)].
//                             `jitter` adds an independent N(0, jitter)
//                             per-unit disturbance to alpha, which makes
//                             Sigma(z) nonsingular when positive.
//   sanasia_independent       per-unit s2_alpha, s2_beta plus one scalar
//                             interference-slope variance shared by every
//                             component of the shared-neighbor graph h.
struct PriorCov {
  PriorKind kind = PriorKind::sutva_uncorrelated;
  int n = 0;
  int max_degree = 0;  // D: interference slots Gamma(1..D)

  Eigen::VectorXd s2_alpha, s2_beta, cov_ab;            // n
  Eigen::MatrixXd s2_gamma, s2_delta, cov_ag, cov_bg;   // n x (D+1)
  Eigen::MatrixXd const_block;                          // (2+D) x (2+D)
  double jitter = 0.0;
  double s2_gamma_scalar = 0.0;
};

PriorCov make_sutva_uncorrelated(int n, double s2a, double s2b, double cab = 0.0);
PriorCov make_sutva_constant(double s2a, double s2b, double cab = 0.0, double jitter = 0.0);
// Var Gamma_i(d) = gamma_coef * d, independent across units and degrees.
PriorCov make_sania_uncorrelated(int n, int max_degree, double s2a, double s2b, double gamma_coef,
                                 double cab = 0.0);
// alpha, beta, Gamma(1..D) equal across units, independent of each other,
// Var Gamma(d) = gamma_coef * d.
PriorCov make_sania_constant(int max_degree, double s2a, double s2b, double gamma_coef,
                             double jitter = 0.0);
PriorCov make_sanasia_independent(int n, double s2a, double s2b, double s2gamma);

// Throws unless every within-unit block (resp. the constant block) is
// positive semidefinite to tolerance -1e-10 on the minimum eigenvalue.
void validate_prior(const PriorCov& prior);

// Precomputes what Sigma(z) assembly needs from (prior, graph): shared-
// neighbor components for the SANASIA kind and dimension checks.
class SigmaAssembler {
 public:
  SigmaAssembler(const PriorCov& prior, const Graph& g);

  const PriorCov& prior() const { return *prior_; }
  int n() const { return g_->size(); }

  Eigen::MatrixXd sigma(const Allocation& z) const;
  // Diagonal entry for uncorrelated kinds; depends on z only through
  // (z_i, d_i^z).
  double sigma_ii(int i, int arm, int deg) const;
  bool diagonal_kind() const;

 private:
  const PriorCov* prior_;
  const Graph* g_;
  std::vector<int> h_label_;  // sanasia: unit -> h component
  int n_comp_ = 0;
};

// Symmetric PSD covariance of the outcome vector (Y_1(z), ..., Y_n(z)) under
// the prior.
Eigen::MatrixXd assemble_sigma_z(const PriorCov& prior, const Graph& g, const Allocation& z);

// sum_z p(z) w(z)' Sigma(z) w(z) - Var(beta_bar); the integrated variance of
// an unbiased linear estimator with the given weights.
double integrated_variance(const WeightScheme& ws, const Design& d, const PriorCov& prior, const Graph& g);

// Var(beta_bar) = (1/n^2) 1' Sigma_beta 1 under the prior.
double beta_bar_variance(const PriorCov& prior);

// A parameter draw whose covariance is exactly the prior's. The model kind
// must be representable by the prior's blocks: SUTVA for sutva_* kinds, SANIA
// or SNIA or NIA for sania/custom kinds (pattern slots reuse the degree
// variance of their popcount; crosses must be zero for NIA), SANASIA for
// sanasia_independent.
ParamSet sample_from_prior(const PriorCov& prior, ModelKind kind, const Graph& g, Rng& rng);

// Prior spec file: "kind <tag>" plus named entries; unspecified entries
// default to 0. See load_prior for the key set.
void save_prior(const PriorCov& prior, const std::string& path);
PriorCov load_prior(const std::string& path, int n, int max_degree);

}  // namespace mivnet

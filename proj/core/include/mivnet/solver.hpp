// solver.hpp — minimum-integrated-variance linear unbiased estimators.
//
// The MIV LUE minimizes (1/2) sum_z p(z) w(z)' Sigma(z) w(z) over weight
// schemes subject to the unbiasedness constraints of the model kind. Routes:
//   solve_general           one sparse KKT system (stationarity plus
//                           feasibility), minimum-norm least squares; works
//                           for singular Sigma(z) via the pseudoinverse
//                           behaviour of the least-squares solve
//   solve_nonsingular       per-allocation elimination w(z) =
//                           -Sigma(z)^{-1} M(z) lambda and a reduced
//                           multiplier system; requires every Sigma(z)
//                           invertible
//   solve_sania_uncorrelated              closed form for SANIA with a prior uncorrelated
//                           across units: propensity-scaled weights averaged
//                           over degree strata
//   solve_nia_uncorrelated          closed form for NIA/SNIA with an uncorrelated
//                           prior: weight only units with no treated
//                           neighbors
//   solve_sanasia           SANASIA with independent unit effects and a
//                           shared interference slope; reduced system with
//                           rank-structured Sigma(z)
//   solve_vertex_transitive stratified naive weights, certified for rings,
//                           complete graphs and the empty graph under
//                           automorphism-symmetric, degree-balanced designs
// Every route reports weights, multipliers and a KKT residual; results
// failing the residual or unbiasedness checks raise SolverError instead of
// being returned.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "mivnet/constraints.hpp"
#include "mivnet/design.hpp"
#include "mivnet/estimators.hpp"
#include "mivnet/graph.hpp"
#include "mivnet/prior.hpp"

namespace mivnet {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleError : SolverError {
  using SolverError::SolverError;
};
struct SingularSigmaError : SolverError {
  using SolverError::SolverError;
};

enum class SolvePath {
  general_pinv,
  nonsingular,
  sania_uncorrelated,
  nia_uncorrelated,
  sanasia_closed,
  vertex_transitive,
};
std::string solve_path_name(SolvePath p);

struct SolveReport {
  WeightScheme weights;
  Eigen::VectorXd multipliers;  // one per constraint row, original prior scale
  double kkt_residual = 0.0;
  SolvePath path_used = SolvePath::general_pinv;
};

// The assembled stationarity-plus-feasibility system. Sigma blocks are
// normalized by `prior_scale` (mean of trace(Sigma(z))/n over the support)
// so residuals are invariant under uniform prior rescaling; stationarity
// rows are divided by p(z). Unknowns: support_size * n weights followed by
// one multiplier per constraint row, with a zero multiplier-multiplier
// block.
struct KKTSystem {
  ModelKind kind = ModelKind::SUTVA;
  const Design* design = nullptr;
  ConstraintSystem constraints;
  double prior_scale = 1.0;
  std::vector<Eigen::MatrixXd> sigma_scaled;  // per supported allocation

  int n() const { return constraints.n; }
  int support_size() const { return constraints.support_size; }
  int weight_unknowns() const { return support_size() * n(); }
  int multiplier_count() const { return static_cast<int>(constraints.rows.size()); }
  int dim() const { return weight_unknowns() + multiplier_count(); }
};

KKTSystem build_kkt(ModelKind kind, const Graph& g, const Design& d, const PriorCov& prior);

// Max-norm of the stationarity and feasibility residuals at the report's
// point, relative to the 1/n right-hand-side scale. Multipliers absent from
// the report (empty vector) are fitted by least squares first.
double kkt_residual(const SolveReport& report, const KKTSystem& system);

struct SolveOptions {
  double tol_unbiased = 1e-8;
  double tol_kkt = 1e-6;
};

SolveReport solve_general(ModelKind kind, const Graph& g, const Design& d, const PriorCov& prior,
                          const SolveOptions& opt = {});
SolveReport solve_nonsingular(ModelKind kind, const Graph& g, const Design& d, const PriorCov& prior,
                              const SolveOptions& opt = {});
// prior kind sania_uncorrelated (or sutva_uncorrelated on the empty graph).
SolveReport solve_sania_uncorrelated(const Graph& g, const Design& d, const PriorCov& prior,
                       const SolveOptions& opt = {});
// kind NIA or SNIA; prior uncorrelated across units.
SolveReport solve_nia_uncorrelated(const Graph& g, const Design& d, const PriorCov& prior,
                           const SolveOptions& opt = {}, ModelKind kind = ModelKind::NIA);
// prior kind sanasia_independent.
SolveReport solve_sanasia(const Graph& g, const Design& d, const PriorCov& prior,
                          const SolveOptions& opt = {});
// Certifies vertex transitivity for ring / complete / empty graphs, design
// symmetry under rotations (ring) or unit permutations (complete, empty),
// and per-allocation treated-degree balance across arms; then returns the
// stratified naive weights checked against the constant-prior KKT system.
SolveReport solve_vertex_transitive(const Graph& g, const Design& d, const SolveOptions& opt = {});

}  // namespace mivnet

// evaluate.hpp — exact design-based evaluation of estimators and the
// simulation sweep harness.
//
// All moments are exact sums over the design support: the only randomness in
// an experiment is the draw of the allocation, so bias, variance and MSE are
// computable without sampling once the support is explicit.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mivnet/design.hpp"
#include "mivnet/estimators.hpp"
#include "mivnet/graph.hpp"
#include "mivnet/outcome.hpp"
#include "mivnet/solver.hpp"

namespace mivnet {

struct EvalReport {
  double mean = 0.0;
  double bias = 0.0;      // mean - beta_bar
  double variance = 0.0;  // exact design variance
  double mse = 0.0;       // bias^2 + variance
};

EvalReport exact_moments(const WeightScheme& ws, const Design& d, const ParamSet& params, const Graph& g);
// Hot-path overload: outcomes precomputed as a support_size x n matrix.
EvalReport exact_moments(const WeightScheme& ws, const Design& d, const Eigen::MatrixXd& outcomes,
                         double beta_bar);

// The six estimators of the simulation study, with their pinned prior
// configurations:
//   naive               difference of means
//   horvitz_thompson    inverse propensity weighting, interference ignored
//   stratified_naive    difference of means within treated-degree strata
//   independent         SANIA MIV LUE, independent prior alpha_i, beta_i ~
//                       N(0,1), Gamma_i(d) ~ N(0,d)
//   equal               SANIA MIV LUE, constant prior alpha, beta ~ N(0,1),
//                       Gamma(d) ~ N(0,d), alpha jitter 1e-4
//   sanasia             SANASIA MIV LUE, alpha_i, beta_i ~ N(0,1),
//                       gamma ~ N(0, 1/n)
struct EstimatorResult {
  std::string name;
  std::optional<WeightScheme> weights;
  std::string error;  // set when construction failed
};

std::vector<EstimatorResult> six_estimators(const Graph& g, const Design& d);
const std::vector<std::string>& six_estimator_names();

enum class SweepScenario { vary_n_density, vary_effects, vary_degree_power };
SweepScenario parse_scenario(const std::string& name);
std::string scenario_name(SweepScenario s);

struct SweepConfig {
  SweepScenario scenario = SweepScenario::vary_n_density;
  std::vector<int> n_values = {8, 10, 12};
  std::string density = "both";  // dense (p=1/2), sparse (p=1/n), or both
  std::vector<double> mu_beta_values = {0.0, 2.0, 4.0};
  std::vector<double> mu_gamma_values = {0.0, 1.0};
  std::vector<double> rho_values = {0.0, 0.5, 1.0, 1.5, 2.0};
  int replicates = 100;
  std::int64_t support_cap = 4096;
  std::uint64_t seed = 1;
  int max_resample = 5;
  int jobs = 1;
  std::vector<std::string> estimators;  // empty = all six
};

SweepConfig load_sweep_config(const std::string& path);

struct SweepRow {
  std::string scenario;
  int n = 0;
  std::string density;   // empty when not applicable
  double mu_beta = 0.0, mu_gamma = 0.0, rho = 0.0;
  bool has_effects = false, has_rho = false;
  std::string estimator;
  int replicates_used = 0;
  double avg_mse = 0.0, avg_bias2 = 0.0, avg_variance = 0.0;
  std::uint64_t seed = 0;
  std::string note;  // resample counts / failure reasons
};

// Runs the sweep grid point by grid point; replicates execute concurrently
// (cfg.jobs workers) with per-replicate derived seeds and a deterministic
// merge order, so output is identical for any job count. Rows for a grid
// point are passed to `sink` as soon as the point completes.
void run_sweep(const SweepConfig& cfg, const std::function<void(const SweepRow&)>& sink);
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

std::string sweep_csv_header();
std::string sweep_csv_line(const SweepRow& row);

}  // namespace mivnet

// estimators.hpp — linear weight schemes and the closed-form baselines:
// naive difference of means, Horvitz-Thompson, and stratified naive.
#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "mivnet/design.hpp"
#include "mivnet/graph.hpp"

namespace mivnet {

// A linear estimator: one weight vector per supported allocation, aligned
// with the design's canonical support order. The estimate under allocation
// k with outcomes y is w.row(k) . y.
struct WeightScheme {
  Eigen::MatrixXd w;  // support_size x n

  double estimate(int k, const Eigen::VectorXd& y) const { return w.row(k).dot(y); }
};

// w_i(z) = z_i / sum(z) - (1 - z_i) / sum(1 - z). Requires every supported
// allocation to have both arms occupied.
WeightScheme naive_weights(const Design& d);

// w_i(z) = (2 z_i - 1) / (n Pr[z_i^obs = z_i]), marginals exact from the
// design. Requires positive marginal probability of each arm for every unit.
WeightScheme ht_weights(const Design& d);

// Difference of means stratified by treated degree:
//   w_i(z) = (C_{d_i^z}(z) / sum_d C_d(z)) (2 z_i - 1) / n_{z_i, d_i^z}
// with C_d(z) = 1{n_{0,d} > 0, n_{1,d} > 0} (1/n_{0,d} + 1/n_{1,d})^{-1}.
// Units in single-arm strata get weight 0. An allocation where every
// stratum is single-arm (sum_d C_d(z) = 0) carries no within-stratum
// contrast at all; the `zero` policy gives it an all-zero weight row, as in
// the simulation study, while `error` rejects the design.
enum class UnbalancedPolicy { zero, error };
WeightScheme stratified_naive_weights(const Graph& g, const Design& d,
                                      UnbalancedPolicy policy = UnbalancedPolicy::zero);

// WeightScheme file: optional "# key value..." metadata lines, then one line
// "<bitstring> w_1 ... w_n" per supported allocation, 17 significant digits.
void save_weights(const WeightScheme& ws, const Design& d, const std::string& path,
                  const std::map<std::string, std::string>& metadata = {});
struct LoadedWeights {
  std::vector<Allocation> support;
  Eigen::MatrixXd w;
  std::map<std::string, std::string> metadata;
};
LoadedWeights load_weights(const std::string& path);
// Reorders loaded rows onto the design's support; throws if they differ.
WeightScheme align_weights(const LoadedWeights& lw, const Design& d);

}  // namespace mivnet

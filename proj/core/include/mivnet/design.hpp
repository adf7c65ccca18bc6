// design.hpp — explicit finite randomization distributions over allocations.
//
// Every design is a list of distinct supported allocations in canonical
// order (ascending bitstring value) plus a strictly positive pmf summing to
// one. All propensities are exact sums over the support.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mivnet/allocation.hpp"
#include "mivnet/graph.hpp"

namespace mivnet {

class Design {
 public:
  Design() = default;
  // Validates: distinct allocations of equal length, positive pmf summing to
  // 1 within 1e-12. Reorders into canonical order.
  static Design from_support(std::vector<Allocation> support, std::vector<double> pmf);

  int n() const { return n_; }
  int size() const { return static_cast<int>(support_.size()); }
  const Allocation& allocation(int k) const { return support_[static_cast<std::size_t>(k)]; }
  double prob(int k) const { return pmf_[static_cast<std::size_t>(k)]; }
  const std::vector<Allocation>& support() const { return support_; }
  const std::vector<double>& pmf() const { return pmf_; }
  std::optional<int> index_of(const Allocation& z) const;
  bool contains_trivial() const;

  // Pr[z_i = 1].
  double marginal(int i) const;

 private:
  int n_ = 0;
  std::vector<Allocation> support_;
  std::vector<double> pmf_;
};

enum class SubsampleWeighting { uniform, bernoulli };

// Bernoulli(q) trial. If the (possibly trivial-excluded) cube fits in `cap`
// the support is the full cube with pmf proportional to q^k (1-q)^(n-k),
// renormalized. Otherwise the support is `cap` distinct allocations sampled
// uniformly without replacement from the non-trivial cube; the pmf is uniform
// by default, or the renormalized Bernoulli masses with
// SubsampleWeighting::bernoulli.
Design bernoulli_design(int n, double q, bool exclude_trivial, std::int64_t cap, std::uint64_t seed,
                        SubsampleWeighting weighting = SubsampleWeighting::uniform);

// Completely randomized design: uniform over the C(n,k) allocations with
// exactly k treated units.
Design crd_design(int n, int k);

Design mixture(std::span<const Design> designs, std::span<const double> weights);

// Supported on the all-zeros allocation plus the indicator of each color
// class, uniform over the M+1 points.
Design coloring_design(const Coloring& coloring, int n);

// Uniform over the distinct cyclic rotations of `base`.
Design orbit_design_ring(int n, const Allocation& base);

// Exact Pr[z_i = z_val, d_i^z = deg_val] under the design; 0 when the event
// is unsupported.
double joint_propensity(const Design& d, const Graph& g, int i, int z_val, int deg_val);

// Design file: one line "<bitstring> <prob>" per supported allocation.
void save_design(const Design& d, const std::string& path);
Design load_design(const std::string& path);

}  // namespace mivnet

// outcome.hpp — potential-outcome parameterizations and their evaluation.
//
// Thirteen model kinds: SUTVA plus the twelve combinations of four
// structural restrictions on neighborhood interference (symmetrically
// received, additive main effects, additive interference, symmetrically
// sent). Symmetrically sent interference is only ever combined with additive
// interference. Each kind fixes a parametric form for Y_i(z); evaluation
// depends on z only through (z_i, z restricted to the in-neighborhood of i).
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mivnet/design.hpp"
#include "mivnet/graph.hpp"
#include "mivnet/rng.hpp"

namespace mivnet {

enum class ModelKind {
  SUTVA,
  NIA,
  SNIA,
  ANIA,
  NAIA,
  SANIA,
  SNAIA,
  ANAIA,
  NASIA,
  SANAIA,
  SNASIA,
  ANASIA,
  SANASIA,
};

ModelKind parse_model_kind(const std::string& name);
std::string model_kind_name(ModelKind k);

// Structural flags per kind.
bool sym_received(ModelKind k);    // Y_i depends on neighbors only via d_i^z
bool additive_main(ModelKind k);   // no treatment-by-interference interaction
bool additive_intf(ModelKind k);   // interference adds across neighbors
bool sym_sent(ModelKind k);        // shared neighbors send equal effects

// Parameter container. Only the blocks relevant to `kind` are used:
//   all kinds           alpha, beta (n-vectors)
//   NIA, ANIA           gamma_pat (+ delta_pat for NIA): per-unit maps keyed
//                       by the bitmask of treated neighbors in ascending
//                       neighbor order; absent entries are 0
//   SNIA, SANIA         gamma_deg (+ delta_deg for SNIA): per-unit maps keyed
//                       by treated degree >= 1
//   NAIA, ANAIA         gamma_edge (+ delta_edge): keyed by (sender, receiver)
//   NASIA, ANASIA       gamma_sender (+ delta_sender): per sending unit
//   SNAIA, SANAIA       gamma_slope (+ delta_slope): per-unit linear slope in d
//   SNASIA, SANASIA     gamma_comp (+ delta_comp): one scalar per connected
//                       component of the shared-neighbor graph h, with
//                       h_component mapping units to components
struct ParamSet {
  ModelKind kind = ModelKind::SUTVA;
  Eigen::VectorXd alpha, beta;

  std::vector<std::map<std::uint64_t, double>> gamma_pat, delta_pat;
  std::vector<std::map<int, double>> gamma_deg, delta_deg;
  std::map<std::pair<int, int>, double> gamma_edge, delta_edge;
  Eigen::VectorXd gamma_sender, delta_sender;
  Eigen::VectorXd gamma_slope, delta_slope;
  std::vector<double> gamma_comp, delta_comp;
  std::vector<int> h_component;  // unit -> component of h, for *SIA kinds
};

// Neighbor-treatment bitmask for unit i: bit b is the treatment of the b-th
// smallest in-neighbor. Requires degree <= 63.
std::uint64_t neighbor_pattern(const Graph& g, const Allocation& z, int i);

// Y_i(z) under the given parameterization.
double evaluate(const ParamSet& params, const Graph& g, const Allocation& z, int i);
Eigen::VectorXd evaluate_all(const ParamSet& params, const Graph& g, const Allocation& z);

// beta_bar, the average direct treatment effect.
double estimand_beta_bar(const ParamSet& params);

// Re-express any kind in the NIA parameterization (upcast only); evaluates
// identically on every allocation.
ParamSet to_nia(const ParamSet& params, const Graph& g);

// Independent normal draws for every parameter slot of the kind:
//   alpha_i ~ N(alpha_mean, alpha_sd^2)
//   beta_i  ~ N(beta_mean, beta_sd^2)
//   degree-indexed interference ~ N(gamma_mean_coef * d, gamma_sd^2)
//   pattern-indexed interference ~ N(gamma_mean_coef * popcount, gamma_sd^2)
//   edge/sender/component interference ~ N(gamma_mean_coef, gamma_sd^2)
//   delta terms likewise with the delta_* fields.
// Draws are keyed by coordinates, so the same seed produces the same value
// for a slot regardless of which other slots the graph requires.
struct SamplingSpec {
  double alpha_mean = 0.0, alpha_sd = 1.0;
  double beta_mean = 2.0, beta_sd = 1.0;
  double gamma_mean_coef = 1.0, gamma_sd = 1.0;
  double delta_mean_coef = 0.0, delta_sd = 0.0;
};

ParamSet sample_params(ModelKind kind, const Graph& g, const SamplingSpec& spec, std::uint64_t seed);

// Parameter file: "kind <name>" then one entry per line; omitted entries
// default to 0. Entry forms: alpha <i> <v>, beta <i> <v>,
// gamma_d/delta_d <i> <d> <v>, gamma_pat/delta_pat <i> <mask> <v>,
// gamma_edge/delta_edge <j> <i> <v>, gamma_sender/delta_sender <j> <v>,
// gamma_slope/delta_slope <i> <v>, gamma_comp/delta_comp <c> <v>.
void save_params(const ParamSet& params, const std::string& path);
ParamSet load_params(const std::string& path, const Graph& g);

}  // namespace mivnet

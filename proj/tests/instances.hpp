// instances.hpp — random preconditioned instances for the closed-form vs
// general-solver equivalence suites. Every generator retries until its
// route's preconditions hold, so each returned instance is solvable by both
// the closed form and the brute-force KKT route.
#pragma once

#include <vector>

#include "mivnet/constraints.hpp"
#include "mivnet/prior.hpp"
#include "mivnet/solver.hpp"
#include "test_util.hpp"

namespace testutil {

using namespace mivnet;

struct SolverInstance {
  Graph g;
  Design d;
  PriorCov prior;
  ModelKind kind = ModelKind::SANIA;
};

inline bool marginals_interior(const Design& d) {
  for (int i = 0; i < d.n(); ++i) {
    const double pi = d.marginal(i);
    if (!(pi > 0.0 && pi < 1.0)) return false;
  }
  return true;
}

inline PriorCov random_uncorrelated(int n, int dmax, Rng& rng, bool with_delta) {
  PriorCov p = make_sania_uncorrelated(n, dmax, 0.3 + rng.uniform01(), 0.3 + rng.uniform01(),
                                       0.3 + rng.uniform01());
  for (int i = 0; i < n; ++i) {
    p.s2_alpha[i] += 0.5 * rng.uniform01();
    p.s2_beta[i] += 0.5 * rng.uniform01();
    p.cov_ab[i] = 0.6 * std::sqrt(p.s2_alpha[i] * p.s2_beta[i]) * (rng.uniform01() - 0.5);
  }
  if (with_delta) {
    p.kind = PriorKind::custom;
    for (int dd = 1; dd <= dmax; ++dd) p.s2_delta.col(dd).setConstant(0.2 + 0.5 * rng.uniform01());
  }
  validate_prior(p);
  return p;
}

inline std::vector<SolverInstance> sania_uncorrelated_instances(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SolverInstance> out;
  while (static_cast<int>(out.size()) < count) {
    const int n = 3 + rng.index(3);  // 3..5
    SolverInstance inst;
    inst.kind = ModelKind::SANIA;
    inst.g = random_er(n, 0.3 + 0.4 * rng.uniform01(), rng.next_u64());
    switch (rng.index(3)) {
      case 0: inst.d = bernoulli_design(n, 0.25 + 0.5 * rng.uniform01(), true, 1 << n, rng.next_u64()); break;
      case 1: {
        std::vector<Design> parts = {crd_design(n, 1 + rng.index(n - 1)), crd_design(n, 1 + rng.index(n - 1))};
        if (parts[0].allocation(0).treated_count() == parts[1].allocation(0).treated_count()) continue;
        std::vector<double> w = {0.4, 0.6};
        inst.d = mixture(parts, w);
        break;
      }
      default: inst.d = random_design(n, rng.next_u64()); break;
    }
    if (!exists_sania(inst.g, inst.d)) continue;
    inst.prior = random_uncorrelated(n, std::max(1, inst.g.max_degree()), rng, false);
    out.push_back(std::move(inst));
  }
  return out;
}

inline std::vector<SolverInstance> nia_uncorrelated_instances(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SolverInstance> out;
  while (static_cast<int>(out.size()) < count) {
    const int n = 3 + rng.index(3);
    SolverInstance inst;
    inst.kind = rng.index(2) ? ModelKind::NIA : ModelKind::SNIA;
    inst.g = random_er(n, 0.3 + 0.4 * rng.uniform01(), rng.next_u64());
    if (rng.index(2)) {
      inst.d = bernoulli_design(n, 0.3 + 0.4 * rng.uniform01(), false, 1 << n, rng.next_u64());
    } else {
      inst.d = coloring_design(greedy_coloring(inst.g), n);
    }
    if (!exists_nia(inst.g, inst.d)) continue;
    inst.prior = random_uncorrelated(n, std::max(1, inst.g.max_degree()), rng,
                                     inst.kind == ModelKind::SNIA || rng.index(2) == 0);
    out.push_back(std::move(inst));
  }
  return out;
}

inline std::vector<SolverInstance> sanasia_instances(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SolverInstance> out;
  while (static_cast<int>(out.size()) < count) {
    const int n = 3 + rng.index(3);
    SolverInstance inst;
    inst.kind = ModelKind::SANASIA;
    inst.g = random_er(n, 0.35 + 0.4 * rng.uniform01(), rng.next_u64());
    inst.d = rng.index(2) ? bernoulli_design(n, 0.3 + 0.4 * rng.uniform01(), true, 1 << n, rng.next_u64())
                          : random_design(n, rng.next_u64());
    if (!marginals_interior(inst.d)) continue;
    if (!exists_by_feasibility(ModelKind::SANASIA, inst.g, inst.d)) continue;
    inst.prior = make_sanasia_independent(n, 0.4 + rng.uniform01(), 0.4 + rng.uniform01(),
                                          0.3 + rng.uniform01());
    out.push_back(std::move(inst));
  }
  return out;
}

// ring orbit designs (or mixtures of two) with every supported allocation
// degree-balanced, plus empty-graph CRD mixtures
inline std::vector<SolverInstance> vertex_transitive_instances(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SolverInstance> out;
  auto balanced = [](const Graph& g, const Design& d) {
    for (int k = 0; k < d.size(); ++k) {
      const Allocation& z = d.allocation(k);
      if (z.trivial()) return false;
      const std::vector<int> deg = g.treated_degrees(z);
      std::set<int> arm[2];
      for (int i = 0; i < d.n(); ++i) arm[z[i]].insert(deg[static_cast<std::size_t>(i)]);
      bool ok = false;
      for (int dd : arm[1])
        if (arm[0].count(dd)) ok = true;
      if (!ok) return false;
    }
    return true;
  };
  while (static_cast<int>(out.size()) < count) {
    SolverInstance inst;
    inst.kind = ModelKind::SANIA;
    if (rng.index(3) == 0) {
      // empty graph with a mixture of completely randomized designs
      const int n = 4 + rng.index(4);
      inst.g = Graph(n);
      std::vector<Design> parts = {crd_design(n, 1 + rng.index(n - 1)), crd_design(n, 1 + rng.index(n - 1))};
      double w0 = 0.2 + 0.6 * rng.uniform01();
      std::vector<double> w = {w0, 1.0 - w0};
      inst.d = mixture(parts, w);
    } else {
      const int n = 4 + rng.index(4);  // rings C4..C7
      inst.g = generate_graph(GraphFamily::ring, n, 0);
      Allocation base(n);
      for (int i = 0; i < n; ++i) base[i] = static_cast<std::uint8_t>(rng.next_u64() & 1);
      if (base.trivial()) continue;
      Design d1 = orbit_design_ring(n, base);
      if (rng.index(2)) {
        Allocation base2(n);
        for (int i = 0; i < n; ++i) base2[i] = static_cast<std::uint8_t>(rng.next_u64() & 1);
        if (base2.trivial()) continue;
        double w0 = 0.2 + 0.6 * rng.uniform01();
        std::vector<Design> parts = {d1, orbit_design_ring(n, base2)};
        std::vector<double> w = {w0, 1.0 - w0};
        inst.d = mixture(parts, w);
      } else {
        inst.d = d1;
      }
    }
    if (!balanced(inst.g, inst.d)) continue;
    if (!exists_sania(inst.g, inst.d)) continue;
    // constant prior with zero jitter; the general route handles the
    // singular Sigma(z) via minimum-norm least squares
    inst.prior = make_sania_constant(std::max(1, inst.g.max_degree()), 1.0, 1.0, 1.0, 0.0);
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace testutil

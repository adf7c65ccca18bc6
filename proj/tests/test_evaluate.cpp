#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "mivnet/evaluate.hpp"
#include "test_util.hpp"

using namespace mivnet;

TEST_CASE("exact moments") {
  Graph g = generate_graph(GraphFamily::ring, 5, 0);
  Design d = bernoulli_design(5, 0.5, true, 100, 0);
  SamplingSpec spec;

  SUBCASE("unbiased scheme has zero bias for any matching parameters") {
    WeightScheme ws = ht_weights(d);
    for (int r = 0; r < 20; ++r) {
      ParamSet p = sample_params(ModelKind::SUTVA, g, spec, 100 + r);
      CHECK(std::abs(exact_moments(ws, d, p, g).bias) < 1e-10);
    }
  }
  SUBCASE("singleton support has zero variance") {
    std::vector<Allocation> sup = {Allocation{1, 0, 1, 0, 0}};
    std::vector<double> pm = {1.0};
    Design single = Design::from_support(sup, pm);
    WeightScheme ws;
    ws.w = Eigen::MatrixXd::Random(1, 5);
    ParamSet p = sample_params(ModelKind::SANIA, g, spec, 3);
    EvalReport rep = exact_moments(ws, single, p, g);
    CHECK(rep.variance == doctest::Approx(0.0));
    CHECK(rep.mse == doctest::Approx(rep.bias * rep.bias));
  }
  SUBCASE("mse identity holds to machine precision") {
    WeightScheme ws = naive_weights(d);
    ParamSet p = sample_params(ModelKind::SANIA, g, spec, 5);
    EvalReport rep = exact_moments(ws, d, p, g);
    CHECK(rep.mse == doctest::Approx(rep.bias * rep.bias + rep.variance).epsilon(1e-12));
  }
  SUBCASE("matches a large Monte Carlo draw of allocations") {
    WeightScheme ws = naive_weights(d);
    ParamSet p = sample_params(ModelKind::SANIA, g, spec, 7);
    EvalReport rep = exact_moments(ws, d, p, g);
    // sample allocations from the design and compare mean and variance
    std::vector<double> est(static_cast<std::size_t>(d.size()));
    std::vector<double> cum(static_cast<std::size_t>(d.size()));
    double acc = 0.0;
    for (int k = 0; k < d.size(); ++k) {
      est[static_cast<std::size_t>(k)] = ws.w.row(k).dot(evaluate_all(p, g, d.allocation(k)));
      acc += d.prob(k);
      cum[static_cast<std::size_t>(k)] = acc;
    }
    Rng rng(99);
    const int draws = 1000000;
    double s1 = 0.0, s2 = 0.0;
    for (int r = 0; r < draws; ++r) {
      const double u = rng.uniform01();
      const int k = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
      const double e = est[static_cast<std::size_t>(std::min(k, d.size() - 1))];
      s1 += e;
      s2 += e * e;
    }
    const double mc_mean = s1 / draws;
    const double mc_var = s2 / draws - mc_mean * mc_mean;
    const double se_mean = std::sqrt(rep.variance / draws);
    CHECK(std::abs(mc_mean - rep.mean) < 4.0 * se_mean);
    CHECK(std::abs(mc_var - rep.variance) < 0.02 * rep.variance + 4.0 * rep.variance / std::sqrt(draws));
  }
}

TEST_CASE("six estimators") {
  SUBCASE("empty graph: independent coincides with Horvitz-Thompson") {
    Graph g(5);
    Design d = bernoulli_design(5, 0.5, true, 100, 0);
    auto ests = six_estimators(g, d);
    REQUIRE(ests.size() == 6);
    const auto& ht = ests[1];
    const auto& indep = ests[3];
    REQUIRE(ht.weights);
    REQUIRE(indep.weights);
    CHECK((ht.weights->w - indep.weights->w).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("solved estimators are unbiased for their model kinds") {
    Graph g = testutil::random_er(8, 0.5, 12);
    Design d = bernoulli_design(8, 0.5, true, 254, 5);
    auto ests = six_estimators(g, d);
    auto find = [&](const std::string& name) -> const EstimatorResult& {
      for (const auto& e : ests)
        if (e.name == name) return e;
      throw std::logic_error("missing estimator");
    };
    {
      const auto& e = find("independent");
      REQUIRE(e.weights);
      ConstraintSystem cs = build_constraints(ModelKind::SANIA, g, d);
      CHECK(check_unbiased(*e.weights, cs, 1e-6).unbiased);
    }
    {
      const auto& e = find("equal");
      REQUIRE(e.weights);
      ConstraintSystem cs = build_constraints(ModelKind::SANIA, g, d);
      CHECK(check_unbiased(*e.weights, cs, 1e-6).unbiased);
    }
    {
      const auto& e = find("sanasia");
      REQUIRE(e.weights);
      ConstraintSystem cs = build_constraints(ModelKind::SANASIA, g, d);
      CHECK(check_unbiased(*e.weights, cs, 1e-6).unbiased);
    }
  }
  SUBCASE("equal tracks the exact constant-prior optimum") {
    Graph g = generate_graph(GraphFamily::triangle_tail_v1, 4, 0);
    Design d = bernoulli_design(4, 0.5, true, 100, 0);
    auto ests = six_estimators(g, d);
    REQUIRE(ests[4].name == "equal");
    REQUIRE(ests[4].weights);
    PriorCov exact_prior = make_sania_constant(3, 1.0, 1.0, 1.0, 0.0);
    SolveReport gen = solve_general(ModelKind::SANIA, g, d, exact_prior);
    // jitter 1e-4 perturbs the optimum far less than the table precision
    CHECK((ests[4].weights->w - gen.weights.w).cwiseAbs().maxCoeff() < 1e-2);
  }
  SUBCASE("per-estimator failures are surfaced, not thrown") {
    // CRD on the triangle-plus-tail: the SANIA-based estimators cannot exist
    Graph g = generate_graph(GraphFamily::triangle_tail_v3, 4, 0);
    Design d = crd_design(4, 2);
    auto ests = six_estimators(g, d);
    for (const auto& e : ests) {
      if (e.name == "independent" || e.name == "equal") {
        CHECK_FALSE(e.weights);
        CHECK_FALSE(e.error.empty());
      }
      if (e.name == "naive") CHECK(e.weights);
    }
  }
  SUBCASE("trivial allocations in support are rejected") {
    Graph g(3);
    Design d = bernoulli_design(3, 0.5, false, 100, 0);
    CHECK_THROWS(six_estimators(g, d));
  }
}

TEST_CASE("integrated variance equals the mean exact variance over prior draws") {
  // law of total variance at zero bias: E_prior[Var_z] = IV for unbiased w
  Graph g = generate_graph(GraphFamily::ring, 4, 0);
  Design d = bernoulli_design(4, 0.5, true, 100, 0);
  PriorCov prior = make_sania_uncorrelated(4, 2, 1.0, 1.0, 1.0);
  SolveReport rep = solve_sania_uncorrelated(g, d, prior);
  const double iv = integrated_variance(rep.weights, d, prior, g);
  Rng rng(123);
  const int draws = 10000;
  double acc = 0.0, acc2 = 0.0;
  for (int r = 0; r < draws; ++r) {
    ParamSet p = sample_from_prior(prior, ModelKind::SANIA, g, rng);
    EvalReport er = exact_moments(rep.weights, d, p, g);
    const double total = er.variance + er.bias * er.bias;
    acc += total;
    acc2 += total * total;
  }
  const double mean = acc / draws;
  const double se = std::sqrt((acc2 / draws - mean * mean) / draws);
  CHECK(std::abs(mean - iv) < 4.0 * se);
}

TEST_CASE("sweep configuration parsing") {
  const std::string path = "test_evaluate_tmp.cfg";
  {
    std::ofstream out(path);
    out << "scenario vary_effects\nn_values 12\nmu_beta_values 0 2 4\nmu_gamma_values 1\n"
        << "replicates 7\nsupport_cap 512\nseed 99\nestimators naive equal\n";
  }
  SweepConfig cfg = load_sweep_config(path);
  CHECK(cfg.scenario == SweepScenario::vary_effects);
  CHECK(cfg.n_values == std::vector<int>{12});
  CHECK(cfg.mu_beta_values == std::vector<double>{0, 2, 4});
  CHECK(cfg.replicates == 7);
  CHECK(cfg.estimators == std::vector<std::string>{"naive", "equal"});
  std::remove(path.c_str());
}

TEST_CASE("sweep is reproducible and parallel-invariant") {
  SweepConfig cfg;
  cfg.scenario = SweepScenario::vary_n_density;
  cfg.n_values = {6};
  cfg.density = "dense";
  cfg.replicates = 4;
  cfg.support_cap = 62;
  cfg.seed = 31;
  cfg.jobs = 1;
  auto rows1 = run_sweep(cfg);
  cfg.jobs = 2;
  auto rows2 = run_sweep(cfg);
  REQUIRE(rows1.size() == 6);
  REQUIRE(rows2.size() == rows1.size());
  for (std::size_t i = 0; i < rows1.size(); ++i) {
    CHECK(rows1[i].estimator == rows2[i].estimator);
    CHECK(rows1[i].avg_mse == rows2[i].avg_mse);  // bit-identical across job counts
    CHECK(rows1[i].replicates_used == rows2[i].replicates_used);
  }
  // different seed, different numbers
  cfg.seed = 32;
  auto rows3 = run_sweep(cfg);
  bool any_diff = false;
  for (std::size_t i = 0; i < rows1.size(); ++i)
    if (rows1[i].avg_mse != rows3[i].avg_mse) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("sweep csv layout") {
  CHECK(sweep_csv_header() ==
        "scenario,n,density,mu_beta,mu_gamma,rho,estimator,replicates_used,avg_mse,avg_bias2,avg_variance,seed,note");
  SweepRow row;
  row.scenario = "vary_degree_power";
  row.n = 8;
  row.rho = 1.5;
  row.has_rho = true;
  row.estimator = "naive";
  row.replicates_used = 3;
  row.avg_mse = 0.5;
  row.avg_bias2 = 0.25;
  row.avg_variance = 0.25;
  row.seed = 7;
  CHECK(sweep_csv_line(row) == "vary_degree_power,8,,,,1.5,naive,3,0.5,0.25,0.25,7,");
}

TEST_CASE("degree-power sweep runs end to end at toy scale") {
  SweepConfig cfg;
  cfg.scenario = SweepScenario::vary_degree_power;
  cfg.n_values = {8};
  cfg.rho_values = {0.0, 2.0};
  cfg.replicates = 3;
  cfg.support_cap = 254;
  cfg.seed = 5;
  cfg.jobs = 2;
  auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 12);
  for (const auto& r : rows) {
    CHECK(r.has_rho);
    CHECK(r.replicates_used >= 1);
    CHECK(std::isfinite(r.avg_mse));
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>

#include "mivnet/constraints.hpp"
#include "mivnet/estimators.hpp"
#include "test_util.hpp"

using namespace mivnet;

TEST_CASE("naive weights") {
  Design d = bernoulli_design(4, 0.5, true, 100, 0);
  WeightScheme ws = naive_weights(d);
  auto row = [&](std::initializer_list<int> bits) {
    Allocation z(4);
    int i = 0;
    for (int b : bits) z[i++] = static_cast<std::uint8_t>(b);
    return ws.w.row(*d.index_of(z));
  };
  Eigen::RowVector4d expect1100(0.5, 0.5, -0.5, -0.5);
  CHECK(row({1, 1, 0, 0}).isApprox(expect1100));
  Eigen::RowVector4d expect1000(1.0, -1.0 / 3, -1.0 / 3, -1.0 / 3);
  CHECK(row({1, 0, 0, 0}).isApprox(expect1000));

  // unbiased under SUTVA for a completely randomized design
  Design crd = crd_design(4, 2);
  ConstraintSystem cs = build_constraints(ModelKind::SUTVA, Graph(4), crd);
  CHECK(check_unbiased(naive_weights(crd), cs, 1e-12).unbiased);

  Design with_zero = crd_design(3, 0);
  CHECK_THROWS(naive_weights(with_zero));
}

TEST_CASE("horvitz-thompson weights") {
  SUBCASE("full Bernoulli cube: everything is +-1/2") {
    Design d = bernoulli_design(4, 0.5, false, 100, 0);
    WeightScheme ws = ht_weights(d);
    for (int k = 0; k < d.size(); ++k)
      for (int i = 0; i < 4; ++i)
        CHECK(std::abs(ws.w(k, i)) == doctest::Approx(0.5));
  }
  SUBCASE("CRD(4,2): +-1/2 from marginals 1/2") {
    Design d = crd_design(4, 2);
    WeightScheme ws = ht_weights(d);
    for (int k = 0; k < d.size(); ++k)
      for (int i = 0; i < 4; ++i)
        CHECK(ws.w(k, i) == doctest::Approx(d.allocation(k)[i] ? 0.5 : -0.5));
  }
  SUBCASE("C1 and C2 hold exactly under marginal overlap") {
    Design d = testutil::random_design(5, 67);
    bool overlap = true;
    for (int i = 0; i < 5; ++i) {
      const double pi = d.marginal(i);
      if (!(pi > 0 && pi < 1)) overlap = false;
    }
    REQUIRE(overlap);
    ConstraintSystem cs = build_constraints(ModelKind::SUTVA, Graph(5), d);
    auto v = check_unbiased(ht_weights(d), cs, 1e-13);
    CHECK(v.unbiased);
  }
  SUBCASE("zero-probability arm rejected") {
    CHECK_THROWS(ht_weights(crd_design(3, 0)));
    std::vector<Allocation> sup = {Allocation{1, 0}, Allocation{1, 1}};
    std::vector<double> pm = {0.5, 0.5};
    CHECK_THROWS(ht_weights(Design::from_support(sup, pm)));  // unit 0 always treated
  }
}

TEST_CASE("stratified naive weights") {
  SUBCASE("empty graph reduces to naive") {
    Graph g(5);
    Design d = bernoulli_design(5, 0.5, true, 100, 0);
    CHECK(stratified_naive_weights(g, d).w.isApprox(naive_weights(d).w));
  }
  SUBCASE("ring C4, allocation 1100: all units sit in the d = 1 stratum") {
    Graph g = generate_graph(GraphFamily::ring, 4, 0);
    Design d = orbit_design_ring(4, Allocation{1, 1, 0, 0});
    WeightScheme ws = stratified_naive_weights(g, d);
    const int k = *d.index_of(Allocation{1, 1, 0, 0});
    Eigen::RowVector4d expect(0.5, 0.5, -0.5, -0.5);
    CHECK(ws.w.row(k).isApprox(expect));
  }
  SUBCASE("not unbiased under SANIA on a Bernoulli trial") {
    Graph g = generate_graph(GraphFamily::triangle_tail_v3, 4, 0);
    Design d = bernoulli_design(4, 0.5, true, 100, 0);
    ConstraintSystem cs = build_constraints(ModelKind::SANIA, g, d);
    auto v = check_unbiased(stratified_naive_weights(g, d), cs, 1e-6);
    CHECK_FALSE(v.unbiased);
  }
  SUBCASE("strict policy rejects designs with an all-unbalanced allocation") {
    // 0010 treats only the hub-adjacent unit: treated degree 0 against
    // controls all at degree 1
    Graph g = generate_graph(GraphFamily::triangle_tail_v3, 4, 0);
    Design d = bernoulli_design(4, 0.5, true, 100, 0);
    CHECK_THROWS(stratified_naive_weights(g, d, UnbalancedPolicy::error));
    WeightScheme ws = stratified_naive_weights(g, d);
    CHECK(ws.w.row(*d.index_of(Allocation{0, 0, 1, 0})).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("orbit-symmetric balanced design on a ring passes the SANIA check") {
    Graph g = generate_graph(GraphFamily::ring, 6, 0);
    std::vector<Design> parts = {orbit_design_ring(6, Allocation{1, 1, 0, 0, 0, 0}),
                                 orbit_design_ring(6, Allocation{1, 1, 0, 1, 0, 0})};
    std::vector<double> w = {0.5, 0.5};
    Design d = mixture(parts, w);
    ConstraintSystem cs = build_constraints(ModelKind::SANIA, g, d);
    CHECK(check_unbiased(stratified_naive_weights(g, d), cs, 1e-10).unbiased);
  }
  SUBCASE("allocation with no balanced stratum: zero row or error by policy") {
    Graph g = generate_graph(GraphFamily::ring, 4, 0);
    Design d = orbit_design_ring(4, Allocation{1, 0, 1, 0});
    CHECK_THROWS(stratified_naive_weights(g, d, UnbalancedPolicy::error));
    CHECK(stratified_naive_weights(g, d).w.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("weights sum to zero within each allocation") {
  Graph g = testutil::random_er(6, 0.5, 10);
  Design d = bernoulli_design(6, 0.5, true, 100, 3);
  for (const WeightScheme& ws : {naive_weights(d), stratified_naive_weights(g, d)})
    for (int k = 0; k < d.size(); ++k) CHECK(ws.w.row(k).sum() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("weight scheme file round trip with metadata") {
  Design d = crd_design(4, 2);
  WeightScheme ws = naive_weights(d);
  const std::string path = "test_estimators_tmp.weights";
  save_weights(ws, d, path, {{"path_used", "sania_uncorrelated"}, {"kkt_residual", "1e-12"}});
  LoadedWeights lw = load_weights(path);
  CHECK(lw.metadata.at("path_used") == "sania_uncorrelated");
  WeightScheme back = align_weights(lw, d);
  CHECK(back.w.isApprox(ws.w, 0.0));
  std::remove(path.c_str());
}

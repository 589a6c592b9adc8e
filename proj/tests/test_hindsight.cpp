#include <doctest.h>

#include <cmath>

#include "optcache/hindsight.hpp"
#include "optcache/model.hpp"
#include "oracles.hpp"

using namespace optcache;

TEST_CASE("single-cache benchmark caches the most requested file") {
  CacheNetwork net = make_single_cache(4, 1.0);
  std::vector<Request> reqs = {{1, 0, 1}, {1, 0, 2}, {2, 0, 3}, {3, 0, 4}, {1, 0, 5}};
  BhsResult res = bhs_prefix(net, reqs);
  CHECK(res.value == doctest::Approx(3.0));
  CHECK(res.value / reqs.size() == doctest::Approx(0.6));
  CHECK(res.x.yv(1, 0) == doctest::Approx(1.0));
  CHECK(res.converged);
}

TEST_CASE("capacity at or above the library caches everything") {
  CacheNetwork net = make_single_cache(4, 4.0);
  std::vector<Request> reqs = {{0, 0, 1}, {1, 0, 2}, {2, 0, 3}};
  BhsResult res = bhs_prefix(net, reqs);
  CHECK(res.value == doctest::Approx(3.0));
}

TEST_CASE("incremental prefix benchmark matches the batch solve") {
  CacheNetwork net = make_single_cache(10, 2.0);
  std::vector<Request> reqs;
  for (int t = 0; t < 60; ++t) reqs.push_back({(t * 7) % 10, 0, t + 1});
  SingleCacheBhs inc(net);
  for (int t = 0; t < 60; ++t) {
    inc.add(reqs[static_cast<std::size_t>(t)]);
    if ((t + 1) % 15 == 0) {
      BhsResult ref = bhs_prefix(net, reqs, t + 1);
      CHECK(inc.best_value() == doctest::Approx(ref.value));
    }
  }
}

TEST_CASE("bipartite benchmark concentrates on the heavy cache") {
  // weights (1,2,100): everything reachable by cache 2 should land there
  CacheNetwork net;
  net.num_files = 3;
  net.num_locations = 1;
  net.num_caches = 3;
  net.capacity = {1.0, 1.0, 1.0};
  net.link = {1, 1, 1};
  net.weights.kind = UtilityWeights::Kind::PerCache;
  net.weights.per_cache = {1.0, 2.0, 100.0};
  net.weights.max_weight = 100.0;

  std::vector<Request> reqs = {{0, 0, 1}, {0, 0, 2}, {1, 0, 3}, {0, 0, 4}};
  BhsResult res = bhs_prefix(net, reqs);
  CHECK(res.x.yv(0, 2) == doctest::Approx(1.0).epsilon(1e-4));
  // cache 2 holds file 0; file 1 lands on the next-best cache (weight 2)
  CHECK(res.value >= 3 * 100.0 + 1 * 2.0 - 1e-2);
}

TEST_CASE("bipartite benchmark matches pattern search on a tiny instance") {
  CacheNetwork net;
  net.num_files = 2;
  net.num_locations = 2;
  net.num_caches = 2;
  net.capacity = {1.0, 1.0};
  net.link = {1, 1, 0, 1};
  net.weights.kind = UtilityWeights::Kind::PerCache;
  net.weights.per_cache = {1.0, 2.0};
  net.weights.max_weight = 2.0;

  std::vector<Request> reqs = {{0, 0, 1}, {1, 1, 2}, {0, 1, 3}, {1, 1, 4}, {0, 0, 5}};
  BhsResult res = bhs_prefix(net, reqs);

  // reference: search directly over y with greedy routing as the evaluator
  auto objective = [&](const std::vector<Real>& y) {
    DecisionVector x = DecisionVector::zeros(net);
    x.y = y;
    Real v = 0.0;
    for (const auto& r : reqs) v += utility(net, r, greedy_routing(net, r, x));
    return -v;
  };
  auto feasible = [&](const std::vector<Real>& y) {
    Real l0 = 0.0, l1 = 0.0;
    for (int n = 0; n < 2; ++n) {
      for (int j = 0; j < 2; ++j) {
        Real v = y[static_cast<std::size_t>(n) * 2 + j];
        if (v < -1e-12 || v > 1.0 + 1e-12) return false;
      }
      l0 += y[static_cast<std::size_t>(n) * 2];
      l1 += y[static_cast<std::size_t>(n) * 2 + 1];
    }
    return l0 <= 1.0 + 1e-12 && l1 <= 1.0 + 1e-12;
  };
  auto best_y = oracles::pattern_search_min(std::vector<Real>(4, 0.0), objective, feasible);
  Real ref_value = -objective(best_y);
  CHECK(res.value >= ref_value - 2e-3);
  CHECK(res.value <= ref_value + 2e-3);
}

TEST_CASE("elastic benchmark shrinks the cache to the budget") {
  CacheNetwork net = make_single_cache(5, 3.0);
  std::vector<Request> reqs;
  for (int t = 0; t < 30; ++t) reqs.push_back({t % 5, 0, t + 1});
  std::vector<std::vector<Real>> prices(31, std::vector<Real>{2.0});
  std::vector<Real> budgets(30, 3.0);  // effective capacity 1.5
  BhsResult res = bhs_elastic(net, reqs, prices, budgets);
  Real load = 0.0;
  for (int n = 0; n < 5; ++n) load += res.x.yv(n, 0);
  CHECK(load <= 1.5 + 1e-9);
  CHECK(res.value == doctest::Approx(9.0));  // 6 requests each; 1.5 files cached
}

TEST_CASE("regret series subtracts cumulative utility from the benchmark") {
  auto r = regret_series({1.0, 2.0, 3.0}, {0.5, 2.0, 2.0});
  CHECK(r[0] == doctest::Approx(0.5));
  CHECK(r[1] == doctest::Approx(0.0));
  CHECK(r[2] == doctest::Approx(1.0));
  CHECK_THROWS_AS(regret_series({1.0}, {1.0, 2.0}), InvalidInput);
}

TEST_CASE("envelope evaluators match the plug-in constants") {
  // J=1, C=1, w=1, t=4: 2 sqrt(2) * sqrt(2) * 2 = 8
  CHECK(bound_thm1_worst(1.0, 1.0, 4.0) == doctest::Approx(8.0));
  CHECK(bound_thm1(1.0, 0.0) == doctest::Approx(0.0));
  // h_t = 2w^2 per slot makes the data-dependent and worst-case forms agree
  Real h = 2.0 * 9.0;  // t=9 slots at w=1
  CHECK(bound_thm1(1.0, h) == doctest::Approx(bound_thm1_worst(1.0, 1.0, 9.0)));

  Thm2Params p;
  p.D = 1.0;
  p.a = 1.0;
  p.beta = 0.5;
  p.s_max = 1.0;
  p.J = 1;
  p.C = 1.0;
  CHECK(p.M() == doctest::Approx(2.0));
  CHECK(bound_thm2_regret(p, 0.0, 9.0) == doctest::Approx(3.0));  // (aM/2) sqrt(t)
  // negative radicand is returned as-is (vacuous bound marker)
  CHECK(bound_thm2_violation(p, 0.0, 1000.0, 4.0) < 0.0);

  CHECK(bound_thm3(0.0, {5.0, 2.0}) == doctest::Approx(2.0));
  CHECK(bound_thm3_worst(1.0, 2, 4.0, {0.0}) == doctest::Approx(2.0 * std::sqrt(8.0)));
}

TEST_CASE("envelope is nondecreasing in t") {
  Real prev = 0.0, h = 0.0;
  for (int t = 1; t <= 50; ++t) {
    h += 0.37;
    Real b = bound_thm1(3.0, h);
    CHECK(b >= prev);
    prev = b;
  }
}

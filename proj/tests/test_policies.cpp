#include <doctest.h>

#include <cmath>

#include "optcache/hindsight.hpp"
#include "optcache/model.hpp"
#include "optcache/policies.hpp"
#include "optcache/predictors.hpp"
#include "optcache/workloads.hpp"

using namespace optcache;

TEST_CASE("oftrl with perfect hints never trails the static optimum") {
  CacheNetwork net = make_single_cache(10, 2.0);
  ZipfSpec zs{10, 1.0, 17};
  auto reqs = zipf_stream(zs, 300);

  ObcPolicy policy(net);
  policy.set_initial_prediction(gradient(net, reqs[0]));
  SingleCacheBhs bhs(net);
  Real cum = 0.0;
  for (std::size_t t = 0; t < reqs.size(); ++t) {
    cum += utility(net, reqs[t], policy.current());
    bhs.add(reqs[t]);
    CHECK(feasibility_residual(net, policy.current()) <= kFeasTol);
    GradientVector next =
        t + 1 < reqs.size() ? gradient(net, reqs[t + 1]) : GradientVector{};
    policy.step(gradient(net, reqs[t]), next);
    CHECK(bhs.best_value() - cum <= 1e-9);
  }
  CHECK(policy.h_cum() == doctest::Approx(0.0));
  CHECK(policy.sigma_cum() == doctest::Approx(0.0));
}

TEST_CASE("pessimistic oftrl accumulates the full gradient energy and obeys the envelope") {
  CacheNetwork net = make_single_cache(20, 3.0);
  ZipfSpec zs{20, 1.1, 5};
  auto reqs = zipf_stream(zs, 400);

  ObcPolicy policy(net);
  SingleCacheBhs bhs(net);
  Real cum = 0.0, energy = 0.0;
  for (std::size_t t = 0; t < reqs.size(); ++t) {
    cum += utility(net, reqs[t], policy.current());
    bhs.add(reqs[t]);
    GradientVector c = gradient(net, reqs[t]);
    energy += c.squared_norm();
    policy.step(c, GradientVector{});
    CHECK(feasibility_residual(net, policy.current()) <= 1e-8);
  }
  CHECK(policy.h_cum() == doctest::Approx(energy));
  Real regret = bhs.best_value() - cum;
  CHECK(regret <= bound_thm1(net.capacity[0], policy.h_cum()) + 1e-6 * reqs.size());
}

TEST_CASE("elastic policy with zero prices reproduces the plain policy bitwise") {
  CacheNetwork net = make_single_cache(15, 2.0);
  ZipfSpec zs{15, 1.0, 23};
  auto reqs = zipf_stream(zs, 200);
  std::vector<Real> zero_prices{0.0};

  ObcPolicy plain(net);
  OecPolicy elastic(net, 1.0, 0.5);
  for (std::size_t t = 0; t < reqs.size(); ++t) {
    Real g = OecPolicy::storage_cost(net, elastic.current(), zero_prices) - 100.0;
    Real lambda = elastic.dual_step(g);
    CHECK(lambda == 0.0);
    GradientVector c = gradient(net, reqs[t]);
    GradientVector next =
        t + 1 < reqs.size() ? gradient(net, reqs[t + 1]) : GradientVector{};
    plain.step(c, next);
    elastic.step(c, next, zero_prices);
    const auto& xa = plain.current();
    const auto& xb = elastic.current();
    REQUIRE(xa.y.size() == xb.y.size());
    REQUIRE(xa.z.size() == xb.z.size());
    for (std::size_t k = 0; k < xa.y.size(); ++k) CHECK(xa.y[k] == xb.y[k]);
    for (std::size_t k = 0; k < xa.z.size(); ++k) CHECK(xa.z[k] == xb.z[k]);
  }
}

TEST_CASE("storage cost sits on the constraint boundary when y matches the budget") {
  CacheNetwork net = make_single_cache(4, 4.0);
  DecisionVector x = DecisionVector::zeros(net);
  x.yv(0, 0) = 1.0;
  x.yv(1, 0) = 0.5;
  std::vector<Real> s{2.0};
  // storage cost 3.0; budget 3.0 -> g = 0
  CHECK(OecPolicy::storage_cost(net, x, s) - 3.0 == doctest::Approx(0.0));
}

TEST_CASE("elastic prices eventually push the cache to shrink") {
  CacheNetwork net = make_single_cache(6, 3.0);
  ZipfSpec zs{6, 0.8, 31};
  auto reqs = zipf_stream(zs, 400);
  OecPolicy policy(net, 2.0, 0.5);
  std::vector<Real> s{1.0};
  Real tight_budget = 1.0;  // far below the capacity of 3
  Real final_load = 0.0;
  for (std::size_t t = 0; t < reqs.size(); ++t) {
    Real g = OecPolicy::storage_cost(net, policy.current(), s) - tight_budget;
    policy.dual_step(g);
    GradientVector c = gradient(net, reqs[t]);
    policy.step(c, GradientVector{}, s);
    final_load = OecPolicy::storage_cost(net, policy.current(), s);
  }
  CHECK(final_load < 2.0);  // pulled well below capacity by the dual prices
  CHECK(policy.lambda() > 0.0);
}

TEST_CASE("gradient ascent fills the cache with the popular file") {
  CacheNetwork net = make_single_cache(5, 1.0);
  OgdPolicy policy(net, ogd_default_eta(net, 100));
  for (int t = 0; t < 100; ++t) {
    policy.step(gradient(net, Request{2, 0, t + 1}));
    CHECK(feasibility_residual(net, policy.current()) <= 1e-8);
  }
  CHECK(policy.current().yv(2, 0) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(policy.current().zv(2, 0, 0) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("certainty-equivalent expert fills its hint first, then lowest indices") {
  auto y = optimistic_expert_action(6, 3.0, {{4, 1.0}});
  CHECK(y[4] == doctest::Approx(1.0));
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(1.0));
  CHECK(y[2] == doctest::Approx(0.0));

  y = optimistic_expert_action(4, 2.5, {});
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(1.0));
  CHECK(y[2] == doctest::Approx(0.5));

  y = optimistic_expert_action(3, 2.0, {{1, -1.0}});
  CHECK(y[1] == doctest::Approx(0.0));  // negatively scored hints are skipped
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[2] == doctest::Approx(1.0));
}

TEST_CASE("expert meta-policy keeps a simplex weight vector and bounded surprises") {
  CacheNetwork net = make_single_cache(30, 3.0);
  ZipfSpec zs{30, 1.2, 41};
  auto reqs = zipf_stream(zs, 500);
  // one perfect optimist, one adversarial optimist
  XcSingleCachePolicy policy(net, 2);
  const int P = policy.num_experts();
  Real prev_h = 0.0;
  for (std::size_t t = 0; t < reqs.size(); ++t) {
    std::vector<Request> preds(2, Request{-1, 0, 1});
    if (t + 1 < reqs.size()) {
      preds[0] = reqs[t + 1];
      preds[1] = Request{(reqs[t + 1].file + 1) % 30, 0, reqs[t + 1].slot};
    }
    policy.step(reqs[t], preds);
    Real sum = 0.0;
    for (int p = 0; p < P; ++p) {
      CHECK(policy.weights()[static_cast<std::size_t>(p)] >= -1e-12);
      sum += policy.weights()[static_cast<std::size_t>(p)];
    }
    CHECK(sum == doctest::Approx(1.0));
    // per-slot meta surprise is at most (P+1) w^2 here P counts all experts
    Real h_step = policy.meta_h_cum() - prev_h;
    prev_h = policy.meta_h_cum();
    CHECK(h_step <= P * 1.0 + 1e-9);
  }
  // the perfect optimist should dominate
  int best = 0;
  for (int p = 1; p < P; ++p)
    if (policy.weights()[static_cast<std::size_t>(p)] > policy.weights()[static_cast<std::size_t>(best)])
      best = p;
  CHECK(best == 1);
  CHECK(policy.expert_cum_utility()[1] >= policy.expert_cum_utility()[2]);
}

TEST_CASE("joint expert meta-policy stays feasible on a bipartite network") {
  CacheNetwork net;
  net.num_files = 6;
  net.num_locations = 2;
  net.num_caches = 2;
  net.capacity = {1.0, 2.0};
  net.link = {1, 1, 0, 1};
  net.weights.kind = UtilityWeights::Kind::PerCache;
  net.weights.per_cache = {1.0, 2.0};
  net.weights.max_weight = 2.0;

  ZipfSpec zs{6, 1.0, 71};
  auto reqs = zipf_stream(zs, 120, 2, 72);
  XcJointPolicy policy(net, 1);
  for (std::size_t t = 0; t < reqs.size(); ++t) {
    std::vector<Request> preds{t + 1 < reqs.size() ? reqs[t + 1] : Request{-1, 0, 1}};
    policy.step(reqs[t], preds);
    CHECK(feasibility_residual(net, policy.current()) <= 1e-7);
    Real sum = 0.0;
    for (Real u : policy.weights()) sum += u;
    CHECK(sum == doctest::Approx(1.0));
  }
  // the perfect optimist should carry most of the weight
  CHECK(policy.weights()[1] > policy.weights()[0]);
}

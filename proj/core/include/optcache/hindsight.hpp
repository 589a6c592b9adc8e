#pragma once

#include <vector>

#include "optcache/types.hpp"

namespace optcache {

struct BhsResult {
  DecisionVector x;
  Real value = 0.0;
  Real residual = 0.0;  // Frank-Wolfe gap (0 for exact paths)
  bool converged = true;
};

// Best static point for the first `prefix` requests (prefix < 0: all).
// Single cache: exact top-by-weighted-count. Bipartite: Frank-Wolfe with a
// greedy linear maximization oracle.
BhsResult bhs_prefix(const CacheNetwork& net, const std::vector<Request>& requests,
                     long prefix = -1, int max_iters = 2000, Real gap_tol = 1e-6);

// Incremental single-cache prefix benchmark: extend with requests, query the
// best static value so far in O(N log N).
class SingleCacheBhs {
 public:
  explicit SingleCacheBhs(const CacheNetwork& net);
  void add(const Request& r);
  Real best_value() const;
  const std::vector<Real>& weighted_counts() const { return counts_; }

 private:
  const CacheNetwork& net_;
  std::vector<Real> counts_;
};

// Best static point subject to every per-slot budget constraint
// sum_j s_j^t sum_n y_nj <= b_t. Exact for a single cache; for general
// networks the unconstrained optimum is scaled into the budget region
// (feasible lower bound, reported with converged = false).
BhsResult bhs_elastic(const CacheNetwork& net, const std::vector<Request>& requests,
                      const std::vector<std::vector<Real>>& prices,
                      const std::vector<Real>& budgets);

// R_t = BHS_t - sum_{tau<=t} f_tau(x_tau), per aligned checkpoint.
std::vector<Real> regret_series(const std::vector<Real>& bhs_values,
                                const std::vector<Real>& policy_cum_utility);

// Analytical regret/violation envelopes, evaluated pointwise.
Real bound_thm1(Real JC, Real h_cum);                       // 2 sqrt(1+JC) sqrt(h)
Real bound_thm1_worst(Real JC, Real w_max, Real t);         // 2 sqrt(2) w sqrt(JC+1) sqrt(t)

struct Thm2Params {
  Real D = 0.0;      // diameter of the decision set
  Real a = 1.0;
  Real beta = 0.5;
  Real s_max = 1.0;
  int J = 1;
  Real C = 1.0;
  Real M() const { return (s_max * J * C) * (s_max * J * C) / (1.0 - beta); }
};

// R-envelope: sqrt(2) D sqrt(h) + (aM/2) t^(1-beta).
Real bound_thm2_regret(const Thm2Params& p, Real h_cum, Real t);
// V-envelope radicand: (2 sqrt(2) D t^beta / a) sqrt(h) + M t - 2 R_t t^beta / a.
// Negative radicand (vacuous bound) yields a negative return value.
Real bound_thm2_violation(const Thm2Params& p, Real h_cum, Real regret_t, Real t);

// 2 sqrt(sum_t ||F_t - F_{t-1}||^2) + min_p R_T^{(p)}.
Real bound_thm3(Real f_shift_sq_cum, const std::vector<Real>& expert_regrets);
// Worst case: 2 w sqrt((P+1) t) + min_p R_T^{(p)}.
Real bound_thm3_worst(Real w_max, int num_experts, Real t,
                      const std::vector<Real>& expert_regrets);

}  // namespace optcache

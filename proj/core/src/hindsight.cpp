#include "optcache/hindsight.hpp"

#include <algorithm>
#include <cmath>

#include "optcache/model.hpp"
#include "optcache/projection.hpp"

namespace optcache {

SingleCacheBhs::SingleCacheBhs(const CacheNetwork& net) : net_(net) {
  if (net.num_caches != 1)
    throw InvalidInput("incremental benchmark: single cache only");
  counts_.assign(static_cast<std::size_t>(net.num_files), 0.0);
}

void SingleCacheBhs::add(const Request& r) {
  net_.check_request(r.file, r.location);
  if (net_.connected(r.location, 0))
    counts_[static_cast<std::size_t>(r.file)] += net_.weight(r.file, r.location, 0);
}

Real SingleCacheBhs::best_value() const {
  CappedSimplexSpec spec;
  spec.dim = net_.num_files;
  spec.cap = 1.0;
  spec.budget = net_.capacity[0];
  if (!net_.file_size.empty()) spec.weight = net_.file_size;
  std::vector<Real> y = maximize_linear_capped(counts_, spec);
  Real v = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) v += counts_[k] * y[k];
  return v;
}

namespace {

BhsResult bhs_single_cache(const CacheNetwork& net, const std::vector<Request>& requests,
                           long L, Real budget_cap) {
  SingleCacheBhs acc(net);
  for (long t = 0; t < L; ++t) acc.add(requests[static_cast<std::size_t>(t)]);
  CappedSimplexSpec spec;
  spec.dim = net.num_files;
  spec.cap = 1.0;
  spec.budget = std::min(net.capacity[0], budget_cap);
  if (!net.file_size.empty()) spec.weight = net.file_size;
  std::vector<Real> y = maximize_linear_capped(acc.weighted_counts(), spec);

  BhsResult res;
  res.x = DecisionVector::zeros(net);
  res.x.y = y;
  for (long t = 0; t < L; ++t) {
    const Request& r = requests[static_cast<std::size_t>(t)];
    int id = res.x.ensure_row(r.file, r.location);
    if (net.connected(r.location, 0))
      res.x.z[static_cast<std::size_t>(id)] = std::clamp(y[static_cast<std::size_t>(r.file)], 0.0, 1.0);
  }
  for (std::size_t k = 0; k < y.size(); ++k)
    res.value += acc.weighted_counts()[k] * y[k];
  return res;
}

struct FwEval {
  Real value = 0.0;
  std::vector<Real> grad;  // over y, N*J
};

// Value and a supergradient of the aggregated routing objective at y.
FwEval evaluate_routing(const CacheNetwork& net, const RowSupport& sup,
                        const std::vector<Real>& mult, const std::vector<Real>& y,
                        std::vector<Real>* z_out) {
  const int J = net.num_caches;
  FwEval ev;
  ev.grad.assign(y.size(), 0.0);
  if (z_out) z_out->assign(static_cast<std::size_t>(sup.rows()) * J, 0.0);
  std::vector<std::pair<Real, int>> order;
  for (int id = 0; id < sup.rows(); ++id) {
    auto [n, i] = sup.keys[static_cast<std::size_t>(id)];
    order.clear();
    for (int j = 0; j < J; ++j)
      if (net.connected(i, j)) order.push_back({net.weight(n, i, j), j});
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    Real remaining = 1.0, nu = 0.0, row_val = 0.0;
    std::vector<std::pair<int, Real>> taken;
    for (const auto& [w, j] : order) {
      if (remaining <= 1e-15) break;
      Real cap = std::clamp(y[static_cast<std::size_t>(n) * J + j], 0.0, 1.0);
      Real take = std::min(cap, remaining);
      if (take > 0.0) {
        row_val += w * take;
        taken.push_back({j, take});
        if (z_out)
          (*z_out)[static_cast<std::size_t>(id) * J + j] = take;
      }
      remaining -= take;
      if (remaining <= 1e-15) nu = w;  // dual of the row simplex
    }
    Real m = mult[static_cast<std::size_t>(id)];
    ev.value += m * row_val;
    // caps z <= y that bind contribute [w - nu]_+ to the y supergradient
    for (const auto& [w, j] : order) {
      Real yv = y[static_cast<std::size_t>(n) * J + j];
      Real zv = 0.0;
      for (const auto& [tj, tv] : taken)
        if (tj == j) zv = tv;
      if (zv >= yv - 1e-12 && w > nu)
        ev.grad[static_cast<std::size_t>(n) * J + j] += m * (w - nu);
    }
  }
  return ev;
}

BhsResult bhs_frank_wolfe(const CacheNetwork& net, const std::vector<Request>& requests,
                          long L, int max_iters, Real gap_tol) {
  const int N = net.num_files, J = net.num_caches;
  RowSupport sup;
  std::vector<Real> mult;
  for (long t = 0; t < L; ++t) {
    const Request& r = requests[static_cast<std::size_t>(t)];
    net.check_request(r.file, r.location);
    int id = sup.ensure(r.file, r.location);
    if (id == static_cast<int>(mult.size())) mult.push_back(0.0);
    mult[static_cast<std::size_t>(id)] += 1.0;
  }

  CappedSimplexSpec spec;
  spec.dim = N;
  spec.cap = 1.0;
  if (!net.file_size.empty()) spec.weight = net.file_size;

  std::vector<Real> y(static_cast<std::size_t>(N) * J, 0.0);
  std::vector<Real> best_y = y;
  Real best_val = 0.0, gap = 0.0;
  bool converged = false;
  std::vector<Real> col(static_cast<std::size_t>(N));
  for (int k = 0; k < max_iters; ++k) {
    FwEval ev = evaluate_routing(net, sup, mult, y, nullptr);
    if (ev.value > best_val) {
      best_val = ev.value;
      best_y = y;
    }
    // linear maximization oracle over the per-cache capped simplices
    std::vector<Real> s(y.size(), 0.0);
    for (int j = 0; j < J; ++j) {
      spec.budget = net.capacity[static_cast<std::size_t>(j)];
      for (int n = 0; n < N; ++n)
        col[static_cast<std::size_t>(n)] = ev.grad[static_cast<std::size_t>(n) * J + j];
      std::vector<Real> sj = maximize_linear_capped(col, spec);
      for (int n = 0; n < N; ++n)
        s[static_cast<std::size_t>(n) * J + j] = sj[static_cast<std::size_t>(n)];
    }
    gap = 0.0;
    for (std::size_t q = 0; q < y.size(); ++q) gap += ev.grad[q] * (s[q] - y[q]);
    if (gap <= gap_tol) {
      converged = true;
      break;
    }
    Real gamma = 2.0 / (k + 2.0);
    for (std::size_t q = 0; q < y.size(); ++q) y[q] = (1.0 - gamma) * y[q] + gamma * s[q];
  }

  BhsResult res;
  res.x = DecisionVector::zeros(net);
  res.x.y = best_y;
  std::vector<Real> z;
  FwEval fin = evaluate_routing(net, sup, mult, best_y, &z);
  res.x.support = sup;
  res.x.z = std::move(z);
  res.value = fin.value;
  res.residual = gap;
  res.converged = converged;
  return res;
}

}  // namespace

BhsResult bhs_prefix(const CacheNetwork& net, const std::vector<Request>& requests,
                     long prefix, int max_iters, Real gap_tol) {
  net.validate();
  long L = prefix < 0 ? static_cast<long>(requests.size())
                      : std::min<long>(prefix, static_cast<long>(requests.size()));
  if (L < 1) throw InvalidInput("hindsight benchmark: empty prefix");
  if (net.num_caches == 1)
    return bhs_single_cache(net, requests, L, net.capacity[0]);
  return bhs_frank_wolfe(net, requests, L, max_iters, gap_tol);
}

BhsResult bhs_elastic(const CacheNetwork& net, const std::vector<Request>& requests,
                      const std::vector<std::vector<Real>>& prices,
                      const std::vector<Real>& budgets) {
  net.validate();
  const long T = static_cast<long>(budgets.size());
  if (T < 1) throw InvalidInput("elastic benchmark: empty horizon");
  if (static_cast<long>(prices.size()) < T)
    throw InvalidInput("elastic benchmark: price stream shorter than budgets");

  if (net.num_caches == 1) {
    Real cap = net.capacity[0];
    for (long t = 0; t < T; ++t) {
      Real s = prices[static_cast<std::size_t>(t)][0];
      if (s > 0.0) cap = std::min(cap, budgets[static_cast<std::size_t>(t)] / s);
    }
    cap = std::max(cap, 0.0);
    return bhs_single_cache(net, requests, static_cast<long>(requests.size()), cap);
  }

  // General network: scale the unconstrained optimum into the budget region.
  BhsResult res = bhs_prefix(net, requests);
  Real rho = 1.0;
  for (long t = 0; t < T; ++t) {
    Real cost = 0.0;
    for (int j = 0; j < net.num_caches; ++j) {
      Real load = 0.0;
      for (int n = 0; n < net.num_files; ++n) load += res.x.yv(n, j);
      cost += prices[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] * load;
    }
    if (cost > budgets[static_cast<std::size_t>(t)] && cost > 0.0)
      rho = std::min(rho, budgets[static_cast<std::size_t>(t)] / cost);
  }
  if (rho < 1.0) {
    for (auto& v : res.x.y) v *= rho;
    for (auto& v : res.x.z) v *= rho;
    res.value *= rho;
    res.converged = false;  // feasible lower bound, not certified optimal
  }
  return res;
}

std::vector<Real> regret_series(const std::vector<Real>& bhs_values,
                                const std::vector<Real>& policy_cum_utility) {
  if (bhs_values.size() != policy_cum_utility.size())
    throw InvalidInput("regret series: length mismatch");
  std::vector<Real> out(bhs_values.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = bhs_values[k] - policy_cum_utility[k];
  return out;
}

Real bound_thm1(Real JC, Real h_cum) {
  return 2.0 * std::sqrt(1.0 + JC) * std::sqrt(std::max(h_cum, 0.0));
}

Real bound_thm1_worst(Real JC, Real w_max, Real t) {
  return 2.0 * std::sqrt(2.0) * w_max * std::sqrt(JC + 1.0) * std::sqrt(std::max(t, 0.0));
}

Real bound_thm2_regret(const Thm2Params& p, Real h_cum, Real t) {
  return std::sqrt(2.0) * p.D * std::sqrt(std::max(h_cum, 0.0)) +
         0.5 * p.a * p.M() * std::pow(std::max(t, 0.0), 1.0 - p.beta);
}

Real bound_thm2_violation(const Thm2Params& p, Real h_cum, Real regret_t, Real t) {
  Real tb = std::pow(std::max(t, 0.0), p.beta);
  Real radicand = (2.0 * std::sqrt(2.0) * p.D * tb / p.a) * std::sqrt(std::max(h_cum, 0.0)) +
                  p.M() * t - 2.0 * regret_t * tb / p.a;
  return radicand < 0.0 ? radicand : std::sqrt(radicand);
}

Real bound_thm3(Real f_shift_sq_cum, const std::vector<Real>& expert_regrets) {
  Real best = expert_regrets.empty() ? 0.0
                                     : *std::min_element(expert_regrets.begin(),
                                                         expert_regrets.end());
  return 2.0 * std::sqrt(std::max(f_shift_sq_cum, 0.0)) + best;
}

Real bound_thm3_worst(Real w_max, int num_experts, Real t,
                      const std::vector<Real>& expert_regrets) {
  Real best = expert_regrets.empty() ? 0.0
                                     : *std::min_element(expert_regrets.begin(),
                                                         expert_regrets.end());
  return 2.0 * w_max * std::sqrt(static_cast<Real>(num_experts) * std::max(t, 0.0)) + best;
}

}  // namespace optcache

#include "optcache/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace optcache {

Real gradient_sq_dist(const GradientVector& a, const GradientVector& b) {
  // Accumulate over the union of supports.
  std::map<std::pair<std::int64_t, int>, Real> diff;
  for (const auto& e : a.entries)
    for (int j = 0; j < static_cast<int>(e.per_cache.size()); ++j)
      if (e.per_cache[j] != 0.0) diff[{row_key(e.file, e.location), j}] += e.per_cache[j];
  for (const auto& e : b.entries)
    for (int j = 0; j < static_cast<int>(e.per_cache.size()); ++j)
      if (e.per_cache[j] != 0.0) diff[{row_key(e.file, e.location), j}] -= e.per_cache[j];
  Real s = 0.0;
  for (const auto& [k, v] : diff) s += v * v;
  return s;
}

Real utility(const CacheNetwork& net, const Request& req, const DecisionVector& x) {
  net.check_request(req.file, req.location);
  int id = x.support.find(req.file, req.location);
  if (id < 0) return 0.0;
  const Real* zr = x.row(id);
  Real u = 0.0;
  for (int j = 0; j < net.num_caches; ++j)
    if (net.connected(req.location, j))
      u += net.weight(req.file, req.location, j) * zr[j];
  return u;
}

Real utility(const CacheNetwork& net, const RequestBatch& batch, const DecisionVector& x) {
  Real u = 0.0;
  for (const auto& r : batch.requests) u += utility(net, r, x);
  return u;
}

GradientVector gradient(const CacheNetwork& net, const Request& req) {
  net.check_request(req.file, req.location);
  GradientVector g;
  GradientVector::Entry e;
  e.file = req.file;
  e.location = req.location;
  e.per_cache.assign(net.num_caches, 0.0);
  for (int j = 0; j < net.num_caches; ++j)
    if (net.connected(req.location, j))
      e.per_cache[j] = net.weight(req.file, req.location, j);
  g.entries.push_back(std::move(e));
  return g;
}

GradientVector gradient(const CacheNetwork& net, const RequestBatch& batch) {
  // Merge duplicate (n, i) pairs so entries stay unique.
  GradientVector g;
  std::map<std::int64_t, int> seen;
  for (const auto& r : batch.requests) {
    GradientVector one = gradient(net, r);
    auto& e = one.entries.front();
    std::int64_t k = row_key(e.file, e.location);
    auto it = seen.find(k);
    if (it == seen.end()) {
      seen.emplace(k, static_cast<int>(g.entries.size()));
      g.entries.push_back(std::move(e));
    } else {
      auto& dst = g.entries[static_cast<std::size_t>(it->second)].per_cache;
      for (int j = 0; j < static_cast<int>(dst.size()); ++j) dst[j] += e.per_cache[j];
    }
  }
  return g;
}

void greedy_route_row(const CacheNetwork& net, int n, int i,
                      const Real* y_row, Real* z_row, int J) {
  std::fill(z_row, z_row + J, 0.0);
  std::vector<int> order;
  for (int j = 0; j < J; ++j)
    if (net.connected(i, j)) order.push_back(j);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return net.weight(n, i, a) > net.weight(n, i, b);
  });
  Real remaining = 1.0;
  for (int j : order) {
    if (remaining <= 0.0) break;
    Real take = std::min(std::clamp(y_row[j], 0.0, 1.0), remaining);
    z_row[j] = take;
    remaining -= take;
  }
}

DecisionVector greedy_routing(const CacheNetwork& net, const Request& req,
                              const DecisionVector& caching) {
  net.check_request(req.file, req.location);
  DecisionVector x = DecisionVector::zeros(net);
  x.y = caching.y;
  int id = x.ensure_row(req.file, req.location);
  greedy_route_row(net, req.file, req.location,
                   x.y.data() + static_cast<std::size_t>(req.file) * x.J,
                   x.row(id), x.J);
  return x;
}

Real feasibility_residual(const CacheNetwork& net, const DecisionVector& x) {
  Real r = 0.0;
  const int N = net.num_files, J = net.num_caches;
  for (int j = 0; j < J; ++j) {
    Real load = 0.0;
    for (int n = 0; n < N; ++n) {
      Real v = x.yv(n, j);
      r = std::max(r, std::max(-v, v - 1.0));
      load += net.size_of(n) * v;
    }
    r = std::max(r, load - net.capacity[static_cast<std::size_t>(j)]);
  }
  for (int id = 0; id < x.support.rows(); ++id) {
    auto [n, i] = x.support.keys[static_cast<std::size_t>(id)];
    const Real* zr = x.row(id);
    Real row_sum = 0.0;
    for (int j = 0; j < J; ++j) {
      Real v = zr[j];
      r = std::max(r, std::max(-v, v - 1.0));
      row_sum += v;
      Real bound = net.connected(i, j) ? x.yv(n, j) : 0.0;
      r = std::max(r, v - bound);
    }
    r = std::max(r, row_sum - 1.0);
  }
  return r;
}

}  // namespace optcache

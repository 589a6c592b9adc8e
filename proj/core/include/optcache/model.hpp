#pragma once

#include "optcache/types.hpp"

namespace optcache {

// System utility f_t(x) = sum over active requests of sum_j w_nij z_nij.
Real utility(const CacheNetwork& net, const Request& req, const DecisionVector& x);
Real utility(const CacheNetwork& net, const RequestBatch& batch, const DecisionVector& x);

// Exact linear-coefficient vector of f_t: entry w_nij on z_nij for each
// active (n, i), zero elsewhere. Independent of x.
GradientVector gradient(const CacheNetwork& net, const Request& req);
GradientVector gradient(const CacheNetwork& net, const RequestBatch& batch);

// Fills the routing row of the requested (n, i) greedily in decreasing
// w_nij order (ties to the lowest cache index), each cache up to y_nj,
// until the row sums to 1. Maximizes f_t given y.
DecisionVector greedy_routing(const CacheNetwork& net, const Request& req,
                              const DecisionVector& caching);

// Same fill, writing into an existing row buffer (J entries).
void greedy_route_row(const CacheNetwork& net, int n, int i,
                      const Real* y_row, Real* z_row, int J);

// Max violation over all X constraints (caps, row simplices, coupling, boxes).
Real feasibility_residual(const CacheNetwork& net, const DecisionVector& x);

}  // namespace optcache

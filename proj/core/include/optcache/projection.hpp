#pragma once

#include "optcache/types.hpp"

namespace optcache {

// {x : 0 <= x_i <= cap, sum_i weight_i x_i <= budget}. Empty weight => unit.
struct CappedSimplexSpec {
  int dim = 0;
  Real cap = 1.0;
  Real budget = 0.0;
  std::vector<Real> weight;

  void validate() const {
    if (dim <= 0) throw InvalidInput("capped simplex: empty dimension");
    if (budget < 0.0) throw InvalidInput("capped simplex: negative budget");
    if (!weight.empty() && static_cast<int>(weight.size()) != dim)
      throw InvalidInput("capped simplex: weight size mismatch");
  }
};

struct ProjectionReport {
  int iterations = 0;
  Real residual = 0.0;
  bool converged = true;
};

// Exact Euclidean projection via the KKT threshold (waterfilling) method.
std::vector<Real> project_capped_simplex(const std::vector<Real>& v,
                                         const CappedSimplexSpec& spec);

// Euclidean projection onto the unit probability simplex (sum == 1, x >= 0).
std::vector<Real> project_simplex(const std::vector<Real>& v);

// Euclidean projection of (y, z) onto the joint caching-routing polytope.
// z holds support.rows() * J entries; only connected coordinates may be
// nonzero. Dykstra over {per-cache caps} x {per-row simplices} x
// {pairwise z <= y boxes}; a closed-form path handles J == 1 exactly.
ProjectionReport project_joint(const CacheNetwork& net, const RowSupport& support,
                               std::vector<Real>& y, std::vector<Real>& z,
                               Real tol = 1e-8, int max_sweeps = 10000);

// y dense N*J plus z on a row support; companion of the policy state.
struct JointVec {
  std::vector<Real> y;
  std::vector<Real> z;
};

// argmin over the spec's set of  sum_tau (sigma_tau/2)||x - x_tau||^2 - <linear, x>
// given sum_sigma = sigma_{1:t} and weighted_center = sum_tau sigma_tau x_tau.
// sum_sigma == 0 falls back to the greedy linear-program branch.
std::vector<Real> oftrl_argmin_capped(Real sum_sigma,
                                      const std::vector<Real>& weighted_center,
                                      const std::vector<Real>& linear,
                                      const CappedSimplexSpec& spec);

std::vector<Real> oftrl_argmin_simplex(Real sum_sigma,
                                       const std::vector<Real>& weighted_center,
                                       const std::vector<Real>& linear);

ProjectionReport oftrl_argmin_joint(const CacheNetwork& net, const RowSupport& support,
                                    Real sum_sigma, const JointVec& weighted_center,
                                    const JointVec& linear, JointVec& out,
                                    Real tol = 1e-8);

// Greedy maximizer of <linear, x> over the joint set (the sigma_{1:t} = 0
// branch): fill y per cache by score, then route each row greedily.
void maximize_linear_joint(const CacheNetwork& net, const RowSupport& support,
                           const JointVec& linear, JointVec& out);

// Greedy maximizer of <coeff, y> over one capped simplex; nonnegative
// coefficients are filled in decreasing order, ties to the lowest index.
std::vector<Real> maximize_linear_capped(const std::vector<Real>& coeff,
                                         const CappedSimplexSpec& spec);

}  // namespace optcache

#pragma once

#include <optional>
#include <vector>

#include "optcache/projection.hpp"
#include "optcache/types.hpp"

namespace optcache {

// Euclidean diameter of the joint set: sqrt(2(JC + B)).
Real joint_diameter(const CacheNetwork& net, int batch_size = 1);

// Optimistic proximal FTRL over the joint caching-routing polytope.
// With zero predictions this is the pessimistic FTRL expert.
class ObcPolicy {
 public:
  // sigma_scale <= 0 picks the default sqrt(2)/D_X.
  ObcPolicy(const CacheNetwork& net, Real sigma_scale = 0.0, int batch_size = 1,
            Real projection_tol = 1e-9);

  // Prediction c~_1 that was available when x_1 was fixed.
  void set_initial_prediction(const GradientVector& pred);

  // Observe c_t, receive c~_{t+1}, emit x_{t+1}. An optional per-cache
  // accumulated price term (sum_i lambda_i s_i) enters the y block of the
  // linear term with negative sign (the elastic variant).
  void step(const GradientVector& observed, const GradientVector& predicted_next,
            const std::vector<Real>* price_cum_per_cache = nullptr);

  const DecisionVector& current() const { return x_; }
  Real h_cum() const { return h_cum_; }
  Real sigma_cum() const { return sigma_cum_; }
  Real sigma_scale() const { return sigma_scale_; }
  const ProjectionReport& last_report() const { return report_; }
  const CacheNetwork& network() const { return net_; }

 private:
  void ensure_rows(const GradientVector& g);

  const CacheNetwork& net_;
  Real sigma_scale_;
  Real projection_tol_;
  Real h_cum_ = 0.0;
  Real sigma_cum_ = 0.0;
  DecisionVector x_;
  JointVec weighted_center_;
  std::vector<Real> c_cum_z_;  // c_{1:t} on the z support
  GradientVector pred_prev_;
  ProjectionReport report_;
};

// Elastic caching: saddle-point iterations around the same OFTRL core.
class OecPolicy {
 public:
  OecPolicy(const CacheNetwork& net, Real a, Real beta, Real sigma_scale = 0.0,
            Real projection_tol = 1e-9);

  void set_initial_prediction(const GradientVector& pred) {
    core_.set_initial_prediction(pred);
  }

  // Closed-form dual maximizer: lambda_{t+1} = (a_{t+1}/2) [g_{1:t}]_+ .
  Real dual_step(Real g_t_value);

  // Primal OFTRL step after the dual update; s_next is the next-slot price
  // vector (J entries), observed before deciding x_{t+1}.
  void step(const GradientVector& observed, const GradientVector& predicted_next,
            const std::vector<Real>& s_next);

  const DecisionVector& current() const { return core_.current(); }
  Real lambda() const { return lambda_; }
  Real g_cum() const { return g_cum_; }
  Real h_cum() const { return core_.h_cum(); }
  const ObcPolicy& core() const { return core_; }

  // Per-slot budget cost sum_j s_j sum_n y_nj (g_t before subtracting b_t).
  static Real storage_cost(const CacheNetwork& net, const DecisionVector& x,
                           const std::vector<Real>& prices);

 private:
  ObcPolicy core_;
  Real a_, beta_;
  Real lambda_ = 0.0;
  Real g_cum_ = 0.0;
  long t_ = 0;
  std::vector<Real> price_cum_;  // sum_i lambda_i s_i per cache
  bool any_price_ = false;
};

// Online gradient ascent with lazy projection onto the joint set.
class OgdPolicy {
 public:
  OgdPolicy(const CacheNetwork& net, Real eta, Real projection_tol = 1e-9);
  void step(const GradientVector& observed);
  const DecisionVector& current() const { return x_; }
  Real eta() const { return eta_; }

 private:
  const CacheNetwork& net_;
  Real eta_;
  Real projection_tol_;
  DecisionVector x_;
};

// Default OGD step size D_X / (w_max sqrt(T)).
Real ogd_default_eta(const CacheNetwork& net, long T, int batch_size = 1);

// ---- single-cache experts ----------------------------------------------

// Sparse coefficient list over y (single cache): (file, value) pairs.
using SparseY = std::vector<std::pair<int, Real>>;

// Certainty-equivalent best response: argmax <coeff, y> over the capped
// simplex; positive coefficients first (descending), then lowest-index fill.
std::vector<Real> optimistic_expert_action(int num_files, Real capacity,
                                           const SparseY& coeff);

// FTRL over one capped simplex (pessimistic expert when predictions stay 0).
class CappedSimplexFtrl {
 public:
  CappedSimplexFtrl(int num_files, Real capacity, Real sigma_scale = 0.0);
  void set_initial_prediction(const SparseY& pred);
  void step(const SparseY& observed, const SparseY& predicted_next);
  const std::vector<Real>& current() const { return y_; }
  Real h_cum() const { return h_cum_; }
  Real sigma_cum() const { return sigma_cum_; }

 private:
  CappedSimplexSpec spec_;
  Real sigma_scale_;
  Real h_cum_ = 0.0, sigma_cum_ = 0.0;
  std::vector<Real> y_, weighted_center_, c_cum_;
  SparseY pred_prev_;
};

// Meta-learner over experts for a single cache: expert 0 is the pessimist,
// experts 1..P are certainty-equivalent optimists.
class XcSingleCachePolicy {
 public:
  XcSingleCachePolicy(const CacheNetwork& net, int num_optimists,
                      Real meta_sigma_scale = 0.0, Real expert_sigma_scale = 0.0);

  // Predicted requests for slot 1 (one per optimist), available before play.
  void set_initial_predictions(const std::vector<Request>& optimist_preds_first);

  // observed realized request at slot t; optimist_preds_next[p] is the
  // predicted request of optimist p for slot t+1 (file == -1: none).
  void step(const Request& realized, const std::vector<Request>& optimist_preds_next);

  const std::vector<Real>& current_y() const { return y_; }
  const std::vector<Real>& weights() const { return u_; }
  int num_experts() const { return static_cast<int>(u_.size()); }
  const std::vector<Real>& expert_cum_utility() const { return expert_cum_utility_; }
  const std::vector<Real>& expert_proposal(int p) const {
    return proposals_[static_cast<std::size_t>(p)];
  }
  Real meta_h_cum() const { return meta_h_cum_; }
  Real performance_shift_sq_cum() const { return f_shift_sq_cum_; }

 private:
  const CacheNetwork& net_;
  CappedSimplexFtrl pessimist_;
  std::vector<std::vector<Real>> proposals_;  // current y^{(p)}_t
  std::vector<Real> u_, y_;
  std::vector<Real> f_cum_;     // F_{1:t}
  std::vector<Real> f_prev_;    // F_t, reused as the hint F~_{t+1}
  std::vector<Real> expert_cum_utility_;
  Real meta_sigma_scale_;
  Real meta_h_cum_ = 0.0, meta_sigma_cum_ = 0.0;
  Real f_shift_sq_cum_ = 0.0;  // sum_t ||F_t - F_{t-1}||^2
  std::vector<Real> meta_center_;
};

// Meta-learner over full caching-routing proposals (the network extension).
class XcJointPolicy {
 public:
  XcJointPolicy(const CacheNetwork& net, int num_optimists, Real meta_sigma_scale = 0.0);
  void set_initial_predictions(const std::vector<Request>& optimist_preds_first);
  void step(const Request& realized, const std::vector<Request>& optimist_preds_next);
  const DecisionVector& current() const { return x_; }
  const std::vector<Real>& weights() const { return u_; }
  const std::vector<Real>& expert_cum_utility() const { return expert_cum_utility_; }
  Real performance_shift_sq_cum() const { return f_shift_sq_cum_; }

 private:
  void ensure_row_everywhere(int n, int i);
  void sync_pessimist_proposal();
  JointVec optimist_proposal(const Request& pred) const;
  void rebuild_combination();

  const CacheNetwork& net_;
  ObcPolicy pessimist_;
  std::vector<JointVec> proposals_;  // on x_'s shared row support
  DecisionVector x_;
  std::vector<Real> u_;
  std::vector<Real> f_cum_, f_prev_, expert_cum_utility_;
  Real meta_sigma_scale_;
  Real meta_h_cum_ = 0.0, meta_sigma_cum_ = 0.0, f_shift_sq_cum_ = 0.0;
  std::vector<Real> meta_center_;
};

}  // namespace optcache

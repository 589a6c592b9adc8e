#include "optcache/policies.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "optcache/model.hpp"

namespace optcache {

Real joint_diameter(const CacheNetwork& net, int batch_size) {
  return std::sqrt(2.0 * (net.total_capacity() + batch_size));
}

// ---- ObcPolicy ----------------------------------------------------------

ObcPolicy::ObcPolicy(const CacheNetwork& net, Real sigma_scale, int batch_size,
                     Real projection_tol)
    : net_(net), projection_tol_(projection_tol) {
  net.validate();
  sigma_scale_ = sigma_scale > 0.0 ? sigma_scale
                                   : std::sqrt(2.0) / joint_diameter(net, batch_size);
  x_ = DecisionVector::zeros(net);
  weighted_center_.y.assign(x_.y.size(), 0.0);
}

void ObcPolicy::ensure_rows(const GradientVector& g) {
  for (const auto& e : g.entries) x_.ensure_row(e.file, e.location);
  std::size_t need = static_cast<std::size_t>(x_.support.rows()) * x_.J;
  if (weighted_center_.z.size() < need) weighted_center_.z.resize(need, 0.0);
  if (c_cum_z_.size() < need) c_cum_z_.resize(need, 0.0);
}

void ObcPolicy::set_initial_prediction(const GradientVector& pred) {
  pred_prev_ = pred;
  if (pred.empty()) return;
  // x_1 maximizes the hint alone (the regularizer sum is still empty).
  ensure_rows(pred);
  JointVec linear;
  linear.z.assign(static_cast<std::size_t>(x_.support.rows()) * x_.J, 0.0);
  for (const auto& e : pred.entries) {
    int id = x_.support.find(e.file, e.location);
    for (int j = 0; j < x_.J; ++j)
      linear.z[static_cast<std::size_t>(id) * x_.J + j] += e.per_cache[static_cast<std::size_t>(j)];
  }
  JointVec out;
  maximize_linear_joint(net_, x_.support, linear, out);
  x_.y = std::move(out.y);
  x_.z = std::move(out.z);
}

void ObcPolicy::step(const GradientVector& observed, const GradientVector& predicted_next,
                     const std::vector<Real>* price_cum_per_cache) {
  ensure_rows(observed);
  ensure_rows(predicted_next);
  const int J = x_.J;

  Real h_t = gradient_sq_dist(observed, pred_prev_);
  Real sqrt_prev = std::sqrt(h_cum_);
  h_cum_ += h_t;
  Real sigma_t = sigma_scale_ * (std::sqrt(h_cum_) - sqrt_prev);
  if (sigma_t > 0.0) {
    sigma_cum_ += sigma_t;
    for (std::size_t k = 0; k < x_.y.size(); ++k)
      weighted_center_.y[k] += sigma_t * x_.y[k];
    for (std::size_t k = 0; k < x_.z.size(); ++k)
      weighted_center_.z[k] += sigma_t * x_.z[k];
  }

  for (const auto& e : observed.entries) {
    int id = x_.support.find(e.file, e.location);
    for (int j = 0; j < J; ++j)
      c_cum_z_[static_cast<std::size_t>(id) * J + j] += e.per_cache[static_cast<std::size_t>(j)];
  }
  pred_prev_ = predicted_next;

  JointVec linear;
  linear.z = c_cum_z_;
  for (const auto& e : predicted_next.entries) {
    int id = x_.support.find(e.file, e.location);
    for (int j = 0; j < J; ++j)
      linear.z[static_cast<std::size_t>(id) * J + j] += e.per_cache[static_cast<std::size_t>(j)];
  }
  if (price_cum_per_cache) {
    linear.y.assign(x_.y.size(), 0.0);
    for (int n = 0; n < net_.num_files; ++n)
      for (int j = 0; j < J; ++j)
        linear.y[static_cast<std::size_t>(n) * J + j] =
            -(*price_cum_per_cache)[static_cast<std::size_t>(j)];
  }

  JointVec out;
  report_ = oftrl_argmin_joint(net_, x_.support, sigma_cum_, weighted_center_, linear, out,
                               projection_tol_);
  x_.y = std::move(out.y);
  x_.z = std::move(out.z);
}

// ---- OecPolicy ----------------------------------------------------------

OecPolicy::OecPolicy(const CacheNetwork& net, Real a, Real beta, Real sigma_scale,
                     Real projection_tol)
    : core_(net, sigma_scale, 1, projection_tol), a_(a), beta_(beta) {
  if (a <= 0.0) throw InvalidInput("elastic policy: a must be positive");
  if (beta < 0.0 || beta >= 1.0) throw InvalidInput("elastic policy: beta outside [0,1)");
  price_cum_.assign(static_cast<std::size_t>(net.num_caches), 0.0);
}

Real OecPolicy::storage_cost(const CacheNetwork& net, const DecisionVector& x,
                             const std::vector<Real>& prices) {
  Real g = 0.0;
  for (int j = 0; j < net.num_caches; ++j) {
    Real load = 0.0;
    for (int n = 0; n < net.num_files; ++n) load += x.yv(n, j);
    g += prices[static_cast<std::size_t>(j)] * load;
  }
  return g;
}

Real OecPolicy::dual_step(Real g_t_value) {
  ++t_;
  g_cum_ += g_t_value;
  Real a_next = a_ * std::pow(static_cast<Real>(t_ + 1), -beta_);
  lambda_ = 0.5 * a_next * std::max(g_cum_, 0.0);
  return lambda_;
}

void OecPolicy::step(const GradientVector& observed, const GradientVector& predicted_next,
                     const std::vector<Real>& s_next) {
  // Call dual_step(g_t) first; lambda_ here is lambda_{t+1}.
  if (s_next.size() != price_cum_.size())
    throw InvalidInput("elastic policy: price vector size mismatch");
  if (lambda_ > 0.0) {
    for (std::size_t j = 0; j < price_cum_.size(); ++j) {
      price_cum_[j] += lambda_ * s_next[j];
      if (price_cum_[j] != 0.0) any_price_ = true;
    }
  }
  core_.step(observed, predicted_next, any_price_ ? &price_cum_ : nullptr);
}

// ---- OgdPolicy ----------------------------------------------------------

OgdPolicy::OgdPolicy(const CacheNetwork& net, Real eta, Real projection_tol)
    : net_(net), eta_(eta), projection_tol_(projection_tol) {
  if (eta <= 0.0) throw InvalidInput("gradient ascent: eta must be positive");
  net.validate();
  x_ = DecisionVector::zeros(net);
}

void OgdPolicy::step(const GradientVector& observed) {
  const int J = x_.J;
  for (const auto& e : observed.entries) {
    int id = x_.ensure_row(e.file, e.location);
    for (int j = 0; j < J; ++j)
      x_.z[static_cast<std::size_t>(id) * J + j] += eta_ * e.per_cache[static_cast<std::size_t>(j)];
  }
  project_joint(net_, x_.support, x_.y, x_.z, projection_tol_);
}

Real ogd_default_eta(const CacheNetwork& net, long T, int batch_size) {
  if (T < 1) throw InvalidInput("gradient ascent: horizon must be positive");
  Real w = std::max(net.weights.max_weight, 1e-12);
  return joint_diameter(net, batch_size) / (w * std::sqrt(static_cast<Real>(T)));
}

// ---- single-cache experts ----------------------------------------------

std::vector<Real> optimistic_expert_action(int num_files, Real capacity,
                                           const SparseY& coeff) {
  std::vector<Real> y(static_cast<std::size_t>(num_files), 0.0);
  SparseY pos;
  std::vector<char> touched(static_cast<std::size_t>(num_files), 0);
  for (const auto& [n, v] : coeff) {
    touched[static_cast<std::size_t>(n)] = 1;
    if (v > 0.0) pos.push_back({n, v});
  }
  std::stable_sort(pos.begin(), pos.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Real remaining = capacity;
  for (const auto& [n, v] : pos) {
    if (remaining <= 0.0) return y;
    Real take = std::min(1.0, remaining);
    y[static_cast<std::size_t>(n)] = take;
    remaining -= take;
  }
  for (int n = 0; n < num_files && remaining > 0.0; ++n) {
    if (touched[static_cast<std::size_t>(n)]) continue;
    Real take = std::min(1.0, remaining);
    y[static_cast<std::size_t>(n)] = take;
    remaining -= take;
  }
  return y;
}

namespace {

Real sparse_sq_dist(const SparseY& a, const SparseY& b) {
  std::map<int, Real> diff;
  for (const auto& [n, v] : a) diff[n] += v;
  for (const auto& [n, v] : b) diff[n] -= v;
  Real s = 0.0;
  for (const auto& [n, v] : diff) s += v * v;
  return s;
}

}  // namespace

CappedSimplexFtrl::CappedSimplexFtrl(int num_files, Real capacity, Real sigma_scale) {
  spec_.dim = num_files;
  spec_.cap = 1.0;
  spec_.budget = capacity;
  spec_.validate();
  sigma_scale_ = sigma_scale > 0.0
                     ? sigma_scale
                     : std::sqrt(2.0) / std::sqrt(2.0 * std::max(capacity, 1e-12));
  y_.assign(static_cast<std::size_t>(num_files), 0.0);
  weighted_center_.assign(static_cast<std::size_t>(num_files), 0.0);
  c_cum_.assign(static_cast<std::size_t>(num_files), 0.0);
}

void CappedSimplexFtrl::set_initial_prediction(const SparseY& pred) {
  pred_prev_ = pred;
  if (pred.empty()) return;
  std::vector<Real> coeff(y_.size(), 0.0);
  for (const auto& [n, v] : pred) coeff[static_cast<std::size_t>(n)] += v;
  y_ = maximize_linear_capped(coeff, spec_);
}

void CappedSimplexFtrl::step(const SparseY& observed, const SparseY& predicted_next) {
  Real h_t = sparse_sq_dist(observed, pred_prev_);
  Real sqrt_prev = std::sqrt(h_cum_);
  h_cum_ += h_t;
  Real sigma_t = sigma_scale_ * (std::sqrt(h_cum_) - sqrt_prev);
  if (sigma_t > 0.0) {
    sigma_cum_ += sigma_t;
    for (std::size_t k = 0; k < y_.size(); ++k) weighted_center_[k] += sigma_t * y_[k];
  }
  for (const auto& [n, v] : observed) c_cum_[static_cast<std::size_t>(n)] += v;
  pred_prev_ = predicted_next;

  std::vector<Real> linear = c_cum_;
  for (const auto& [n, v] : predicted_next) linear[static_cast<std::size_t>(n)] += v;
  y_ = oftrl_argmin_capped(sigma_cum_, weighted_center_, linear, spec_);
}

// ---- XcSingleCachePolicy -------------------------------------------------

XcSingleCachePolicy::XcSingleCachePolicy(const CacheNetwork& net, int num_optimists,
                                         Real meta_sigma_scale, Real expert_sigma_scale)
    : net_(net),
      pessimist_(net.num_files, net.capacity.empty() ? 0.0 : net.capacity[0],
                 expert_sigma_scale) {
  net.validate();
  if (net.num_caches != 1)
    throw InvalidInput("expert meta-policy: single-cache variant needs one cache");
  if (num_optimists < 1) throw InvalidInput("expert meta-policy: need an optimist");
  const int P = num_optimists + 1;
  // sqrt(2)/D over the simplex (D = sqrt(2)) is 1.
  meta_sigma_scale_ = meta_sigma_scale > 0.0 ? meta_sigma_scale : 1.0;
  u_.assign(static_cast<std::size_t>(P), 1.0 / P);
  f_cum_.assign(static_cast<std::size_t>(P), 0.0);
  f_prev_.assign(static_cast<std::size_t>(P), 0.0);
  expert_cum_utility_.assign(static_cast<std::size_t>(P), 0.0);
  meta_center_.assign(static_cast<std::size_t>(P), 0.0);
  proposals_.assign(static_cast<std::size_t>(P),
                    std::vector<Real>(static_cast<std::size_t>(net.num_files), 0.0));
  y_.assign(static_cast<std::size_t>(net.num_files), 0.0);
}

void XcSingleCachePolicy::set_initial_predictions(
    const std::vector<Request>& optimist_preds_first) {
  const Real C = net_.capacity[0];
  for (std::size_t p = 0; p + 1 < proposals_.size(); ++p) {
    const Request& r = optimist_preds_first[p];
    SparseY coeff;
    if (r.file >= 0) coeff.push_back({r.file, net_.weight(r.file, r.location, 0)});
    proposals_[p + 1] = optimistic_expert_action(net_.num_files, C, coeff);
  }
  for (std::size_t k = 0; k < y_.size(); ++k) {
    Real v = 0.0;
    for (std::size_t p = 0; p < proposals_.size(); ++p) v += u_[p] * proposals_[p][k];
    y_[k] = v;
  }
}

void XcSingleCachePolicy::step(const Request& realized,
                               const std::vector<Request>& optimist_preds_next) {
  const int P = num_experts();
  net_.check_request(realized.file, realized.location);
  const Real w = net_.weight(realized.file, realized.location, 0);

  // per-expert reward F_t and the meta update
  std::vector<Real> f_t(static_cast<std::size_t>(P));
  Real shift = 0.0, meta_h = 0.0;
  for (int p = 0; p < P; ++p) {
    f_t[static_cast<std::size_t>(p)] =
        w * proposals_[static_cast<std::size_t>(p)][static_cast<std::size_t>(realized.file)];
    Real d = f_t[static_cast<std::size_t>(p)] - f_prev_[static_cast<std::size_t>(p)];
    shift += d * d;
    meta_h += d * d;  // the hint is the previous reward vector
    expert_cum_utility_[static_cast<std::size_t>(p)] += f_t[static_cast<std::size_t>(p)];
  }
  f_shift_sq_cum_ += shift;

  Real sqrt_prev = std::sqrt(meta_h_cum_);
  meta_h_cum_ += meta_h;
  Real sigma_t = meta_sigma_scale_ * (std::sqrt(meta_h_cum_) - sqrt_prev);
  if (sigma_t > 0.0) {
    meta_sigma_cum_ += sigma_t;
    for (int p = 0; p < P; ++p)
      meta_center_[static_cast<std::size_t>(p)] += sigma_t * u_[static_cast<std::size_t>(p)];
  }
  for (int p = 0; p < P; ++p)
    f_cum_[static_cast<std::size_t>(p)] += f_t[static_cast<std::size_t>(p)];
  f_prev_ = f_t;

  std::vector<Real> linear(static_cast<std::size_t>(P));
  for (int p = 0; p < P; ++p)
    linear[static_cast<std::size_t>(p)] =
        f_cum_[static_cast<std::size_t>(p)] + f_t[static_cast<std::size_t>(p)];
  u_ = oftrl_argmin_simplex(meta_sigma_cum_, meta_center_, linear);

  // expert proposals for slot t+1
  pessimist_.step({{realized.file, w}}, {});
  proposals_[0] = pessimist_.current();
  const Real C = net_.capacity[0];
  for (int p = 1; p < P; ++p) {
    const Request& r = optimist_preds_next[static_cast<std::size_t>(p - 1)];
    SparseY coeff;
    if (r.file >= 0) coeff.push_back({r.file, net_.weight(r.file, r.location, 0)});
    proposals_[static_cast<std::size_t>(p)] = optimistic_expert_action(net_.num_files, C, coeff);
  }

  for (std::size_t k = 0; k < y_.size(); ++k) {
    Real v = 0.0;
    for (int p = 0; p < P; ++p)
      v += u_[static_cast<std::size_t>(p)] * proposals_[static_cast<std::size_t>(p)][k];
    y_[k] = v;
  }
}

// ---- XcJointPolicy -------------------------------------------------------

XcJointPolicy::XcJointPolicy(const CacheNetwork& net, int num_optimists,
                             Real meta_sigma_scale)
    : net_(net), pessimist_(net) {
  net.validate();
  if (num_optimists < 1) throw InvalidInput("expert meta-policy: need an optimist");
  const int P = num_optimists + 1;
  meta_sigma_scale_ = meta_sigma_scale > 0.0 ? meta_sigma_scale : 1.0;
  u_.assign(static_cast<std::size_t>(P), 1.0 / P);
  f_cum_.assign(static_cast<std::size_t>(P), 0.0);
  f_prev_.assign(static_cast<std::size_t>(P), 0.0);
  expert_cum_utility_.assign(static_cast<std::size_t>(P), 0.0);
  meta_center_.assign(static_cast<std::size_t>(P), 0.0);
  x_ = DecisionVector::zeros(net);
  proposals_.resize(static_cast<std::size_t>(P));
  for (auto& pr : proposals_) pr.y.assign(x_.y.size(), 0.0);
}

void XcJointPolicy::ensure_row_everywhere(int n, int i) {
  x_.ensure_row(n, i);
  std::size_t need = static_cast<std::size_t>(x_.support.rows()) * x_.J;
  for (auto& pr : proposals_)
    if (pr.z.size() < need) pr.z.resize(need, 0.0);
}

void XcJointPolicy::sync_pessimist_proposal() {
  const DecisionVector& px = pessimist_.current();
  JointVec& out = proposals_[0];
  out.y = px.y;
  const int J = x_.J;
  for (int id = 0; id < x_.support.rows(); ++id) {
    auto [n, i] = x_.support.keys[static_cast<std::size_t>(id)];
    for (int j = 0; j < J; ++j)
      out.z[static_cast<std::size_t>(id) * J + j] = px.zv(n, i, j);
  }
}

JointVec XcJointPolicy::optimist_proposal(const Request& pred) const {
  JointVec linear;
  linear.z.assign(static_cast<std::size_t>(x_.support.rows()) * x_.J, 0.0);
  if (pred.file >= 0) {
    int id = x_.support.find(pred.file, pred.location);
    for (int j = 0; j < x_.J; ++j)
      if (net_.connected(pred.location, j))
        linear.z[static_cast<std::size_t>(id) * x_.J + j] =
            net_.weight(pred.file, pred.location, j);
  }
  JointVec out;
  maximize_linear_joint(net_, x_.support, linear, out);
  return out;
}

void XcJointPolicy::rebuild_combination() {
  const int P = static_cast<int>(u_.size());
  std::fill(x_.y.begin(), x_.y.end(), 0.0);
  std::fill(x_.z.begin(), x_.z.end(), 0.0);
  for (int p = 0; p < P; ++p) {
    const JointVec& pr = proposals_[static_cast<std::size_t>(p)];
    Real up = u_[static_cast<std::size_t>(p)];
    for (std::size_t k = 0; k < x_.y.size(); ++k) x_.y[k] += up * pr.y[k];
    for (std::size_t k = 0; k < x_.z.size(); ++k) x_.z[k] += up * pr.z[k];
  }
}

void XcJointPolicy::set_initial_predictions(const std::vector<Request>& optimist_preds_first) {
  for (std::size_t p = 0; p + 1 < proposals_.size(); ++p) {
    const Request& r = optimist_preds_first[p];
    if (r.file >= 0) ensure_row_everywhere(r.file, r.location);
    proposals_[p + 1] = optimist_proposal(r);
  }
  rebuild_combination();
}

void XcJointPolicy::step(const Request& realized, const std::vector<Request>& optimist_preds_next) {
  const int P = static_cast<int>(u_.size());
  net_.check_request(realized.file, realized.location);
  ensure_row_everywhere(realized.file, realized.location);
  const int J = x_.J;
  int rid = x_.support.find(realized.file, realized.location);

  std::vector<Real> f_t(static_cast<std::size_t>(P), 0.0);
  Real shift = 0.0;
  for (int p = 0; p < P; ++p) {
    const JointVec& pr = proposals_[static_cast<std::size_t>(p)];
    Real f = 0.0;
    for (int j = 0; j < J; ++j)
      if (net_.connected(realized.location, j))
        f += net_.weight(realized.file, realized.location, j) *
             pr.z[static_cast<std::size_t>(rid) * J + j];
    f_t[static_cast<std::size_t>(p)] = f;
    Real d = f - f_prev_[static_cast<std::size_t>(p)];
    shift += d * d;
    expert_cum_utility_[static_cast<std::size_t>(p)] += f;
  }
  f_shift_sq_cum_ += shift;

  Real sqrt_prev = std::sqrt(meta_h_cum_);
  meta_h_cum_ += shift;
  Real sigma_t = meta_sigma_scale_ * (std::sqrt(meta_h_cum_) - sqrt_prev);
  if (sigma_t > 0.0) {
    meta_sigma_cum_ += sigma_t;
    for (int p = 0; p < P; ++p)
      meta_center_[static_cast<std::size_t>(p)] += sigma_t * u_[static_cast<std::size_t>(p)];
  }
  for (int p = 0; p < P; ++p)
    f_cum_[static_cast<std::size_t>(p)] += f_t[static_cast<std::size_t>(p)];
  f_prev_ = f_t;

  std::vector<Real> linear(static_cast<std::size_t>(P));
  for (int p = 0; p < P; ++p)
    linear[static_cast<std::size_t>(p)] =
        f_cum_[static_cast<std::size_t>(p)] + f_t[static_cast<std::size_t>(p)];
  u_ = oftrl_argmin_simplex(meta_sigma_cum_, meta_center_, linear);

  pessimist_.step(gradient(net_, realized), GradientVector{});
  for (const auto& r : optimist_preds_next)
    if (r.file >= 0) ensure_row_everywhere(r.file, r.location);
  sync_pessimist_proposal();
  for (int p = 1; p < P; ++p)
    proposals_[static_cast<std::size_t>(p)] =
        optimist_proposal(optimist_preds_next[static_cast<std::size_t>(p - 1)]);
  rebuild_combination();
}

}  // namespace optcache

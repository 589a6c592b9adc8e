#include "optcache/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "optcache/hindsight.hpp"
#include "optcache/model.hpp"
#include "optcache/policies.hpp"

namespace optcache {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void expect_keys(const json& o, const std::vector<std::string>& allowed,
                 const std::string& where) {
  if (!o.is_object()) throw InvalidInput("config: '" + where + "' must be an object");
  for (const auto& [key, _] : o.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw InvalidInput("config: unknown key '" + key + "' in " + where);
  }
}

CacheNetwork parse_network(const json& o) {
  expect_keys(o, {"files", "locations", "caches", "capacity", "links", "weights",
                  "file_sizes"},
              "network");
  CacheNetwork net;
  net.num_files = o.at("files").get<int>();
  net.num_locations = o.value("locations", 1);
  net.num_caches = o.value("caches", 1);
  const auto& cap = o.at("capacity");
  if (cap.is_number()) {
    net.capacity.assign(static_cast<std::size_t>(net.num_caches), cap.get<Real>());
  } else {
    net.capacity = cap.get<std::vector<Real>>();
  }
  if (o.contains("links")) {
    auto rows = o.at("links").get<std::vector<std::vector<int>>>();
    if (static_cast<int>(rows.size()) != net.num_locations)
      throw InvalidInput("config: links row count mismatch");
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != net.num_caches)
        throw InvalidInput("config: links column count mismatch");
      for (int v : r) net.link.push_back(v ? 1 : 0);
    }
  } else {
    net.link.assign(static_cast<std::size_t>(net.num_locations) * net.num_caches, 1);
  }
  if (o.contains("weights")) {
    const auto& w = o.at("weights");
    expect_keys(w, {"kind", "value", "values"}, "network.weights");
    std::string kind = w.value("kind", "uniform");
    if (kind == "uniform") {
      net.weights.kind = UtilityWeights::Kind::Uniform;
      net.weights.uniform = w.value("value", 1.0);
      net.weights.max_weight = net.weights.uniform;
    } else if (kind == "per_cache") {
      net.weights.kind = UtilityWeights::Kind::PerCache;
      net.weights.per_cache = w.at("values").get<std::vector<Real>>();
      if (static_cast<int>(net.weights.per_cache.size()) != net.num_caches)
        throw InvalidInput("config: per-cache weights size mismatch");
      net.weights.max_weight =
          *std::max_element(net.weights.per_cache.begin(), net.weights.per_cache.end());
    } else if (kind == "per_location_cache") {
      net.weights.kind = UtilityWeights::Kind::PerLocationCache;
      net.weights.per_loc_cache = w.at("values").get<std::vector<Real>>();
      if (static_cast<int>(net.weights.per_loc_cache.size()) !=
          net.num_locations * net.num_caches)
        throw InvalidInput("config: per-location-cache weights size mismatch");
      net.weights.max_weight = *std::max_element(net.weights.per_loc_cache.begin(),
                                                 net.weights.per_loc_cache.end());
    } else {
      throw InvalidInput("config: unknown weight kind '" + kind + "'");
    }
  }
  if (o.contains("file_sizes")) net.file_size = o.at("file_sizes").get<std::vector<Real>>();
  net.validate();
  return net;
}

WorkloadConfig parse_workload(const json& o) {
  expect_keys(o, {"kind", "T", "batch", "zeta", "path", "min_requests", "random_locations"},
              "workload");
  WorkloadConfig w;
  std::string kind = o.value("kind", "zipf");
  if (kind == "zipf") {
    w.kind = WorkloadConfig::Kind::Zipf;
    w.T = o.at("T").get<long>();
  } else if (kind == "trace") {
    w.kind = WorkloadConfig::Kind::Trace;
    w.T = o.value("T", 0L);
    w.trace.path = o.at("path").get<std::string>();
    w.trace.min_requests = o.value("min_requests", 1);
    w.trace.random_locations = o.value("random_locations", false);
  } else {
    throw InvalidInput("config: unknown workload kind '" + kind + "'");
  }
  w.batch = o.value("batch", 1);
  w.zeta = o.value("zeta", 1.0);
  if (w.batch < 1) throw InvalidInput("config: batch must be >= 1");
  return w;
}

PredictorSpec parse_predictor(const json& o, std::size_t idx, std::uint64_t seed) {
  expect_keys(o, {"kind", "rho", "period", "seed"}, "predictors[" + std::to_string(idx) + "]");
  PredictorSpec s;
  std::string kind = o.at("kind").get<std::string>();
  if (kind == "oracle")
    s.kind = PredictorKind::Oracle;
  else if (kind == "follow_prob")
    s.kind = PredictorKind::FollowProb;
  else if (kind == "alternating")
    s.kind = PredictorKind::Alternating;
  else if (kind == "adversarial")
    s.kind = PredictorKind::Adversarial;
  else if (kind == "zero")
    s.kind = PredictorKind::Zero;
  else
    throw InvalidInput("config: unknown predictor kind '" + kind + "'");
  s.rho = o.value("rho", 0.0);
  s.period = o.value("period", 1L);
  s.seed = o.value("seed", seed + 1000 + idx);
  s.validate();
  return s;
}

PolicyConfig parse_policy(const json& o) {
  expect_keys(o, {"kind", "sigma", "predictor", "optimists", "a", "beta", "eta",
                  "meta_sigma"},
              "policy");
  PolicyConfig p;
  std::string kind = o.at("kind").get<std::string>();
  if (kind == "obc")
    p.kind = PolicyKind::Obc;
  else if (kind == "oec")
    p.kind = PolicyKind::Oec;
  else if (kind == "xc")
    p.kind = PolicyKind::Xc;
  else if (kind == "ogd")
    p.kind = PolicyKind::Ogd;
  else if (kind == "pessimist")
    p.kind = PolicyKind::Pessimist;
  else
    throw InvalidInput("config: unknown policy kind '" + kind + "'");
  p.sigma = o.value("sigma", 0.0);
  p.predictor = o.value("predictor", 0);
  if (o.contains("optimists")) p.optimists = o.at("optimists").get<std::vector<int>>();
  p.a = o.value("a", 1.0);
  p.beta = o.value("beta", 0.5);
  p.eta = o.value("eta", 0.0);
  p.meta_sigma = o.value("meta_sigma", 0.0);
  return p;
}

BudgetConfig parse_budget(const json& o, std::uint64_t seed) {
  expect_keys(o, {"prices", "budget", "seed"}, "budget");
  BudgetConfig b;
  b.enabled = true;
  if (o.contains("prices")) {
    const auto& pr = o.at("prices");
    expect_keys(pr, {"kind", "value"}, "budget.prices");
    std::string kind = pr.value("kind", "uniform");
    if (kind == "uniform")
      b.prices.price_kind = PriceStreamSpec::PriceKind::Uniform;
    else if (kind == "constant")
      b.prices.price_kind = PriceStreamSpec::PriceKind::Constant;
    else
      throw InvalidInput("config: unknown price kind '" + kind + "'");
    b.prices.price_value = pr.value("value", 1.0);
  }
  if (o.contains("budget")) {
    const auto& bu = o.at("budget");
    expect_keys(bu, {"kind", "mean", "std", "scale", "value"}, "budget.budget");
    std::string kind = bu.value("kind", "normal");
    if (kind == "normal")
      b.prices.budget_kind = PriceStreamSpec::BudgetKind::Normal;
    else if (kind == "constant")
      b.prices.budget_kind = PriceStreamSpec::BudgetKind::Constant;
    else
      throw InvalidInput("config: unknown budget kind '" + kind + "'");
    b.prices.budget_mean = bu.value("mean", 0.5);
    b.prices.budget_std = bu.value("std", 0.05);
    b.prices.budget_scale = bu.value("scale", 10.0);
    b.prices.budget_value = bu.value("value", 0.0);
  }
  b.prices.seed = o.value("seed", seed + 303);
  return b;
}

std::string fmt(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  network.validate();
  if (workload.kind == WorkloadConfig::Kind::Zipf && workload.T < 1)
    throw InvalidInput("config: zipf workload needs a positive horizon T");
  if (policy.kind == PolicyKind::Oec && !budget.enabled)
    throw InvalidInput("config: elastic policy needs a budget block");
  if (policy.kind == PolicyKind::Xc) {
    if (policy.optimists.empty())
      throw InvalidInput("config: expert policy needs at least one optimist predictor");
    if (workload.batch != 1)
      throw InvalidInput("config: expert policy supports batch size 1 only");
    for (int idx : policy.optimists)
      if (idx < 0 || idx >= static_cast<int>(predictors.size()))
        throw InvalidInput("config: optimist predictor index out of range");
  }
  if ((policy.kind == PolicyKind::Obc || policy.kind == PolicyKind::Oec) &&
      !predictors.empty() &&
      (policy.predictor < 0 || policy.predictor >= static_cast<int>(predictors.size())))
    throw InvalidInput("config: policy predictor index out of range");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw InvalidInput(std::string("config: JSON parse failure: ") + e.what());
  }
  expect_keys(j, {"seed", "network", "workload", "predictors", "policy", "budget", "output"},
              "top level");
  ExperimentConfig c;
  c.seed = j.value("seed", 1ULL);
  c.network = parse_network(j.at("network"));
  c.workload = parse_workload(j.at("workload"));
  if (j.contains("predictors")) {
    const auto& arr = j.at("predictors");
    if (!arr.is_array()) throw InvalidInput("config: 'predictors' must be an array");
    for (std::size_t p = 0; p < arr.size(); ++p)
      c.predictors.push_back(parse_predictor(arr[p], p, c.seed));
  }
  c.policy = parse_policy(j.at("policy"));
  if (j.contains("budget")) c.budget = parse_budget(j.at("budget"), c.seed);
  if (j.contains("output")) {
    expect_keys(j.at("output"), {"checkpoint_stride"}, "output");
    c.output.checkpoint_stride = j.at("output").value("checkpoint_stride", 0L);
  }
  c.workload.trace.num_locations = c.network.num_locations;
  c.workload.trace.seed = c.seed + 404;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

namespace {

struct SimState {
  const ExperimentConfig& cfg;
  const CacheNetwork& net;
  std::vector<RequestBatch> batches;
  PredictionTrace preds;
  PriceStream prices;
  Real s_max = 0.0;
};

std::vector<Request> predicted_batch(const SimState& st, int predictor, std::size_t slot) {
  std::vector<Request> out;
  if (predictor < 0 || predictor >= static_cast<int>(st.preds.predicted.size())) return out;
  if (slot >= st.batches.size()) return out;
  const auto& pb = st.batches[slot];
  // prediction positions mirror the realized batch layout
  std::size_t base = 0;
  for (std::size_t k = 0; k < slot; ++k) base += st.batches[k].requests.size();
  for (std::size_t q = 0; q < pb.requests.size(); ++q)
    out.push_back(st.preds.predicted[static_cast<std::size_t>(predictor)][base + q]);
  return out;
}

Real xc_single_utility(const CacheNetwork& net, const std::vector<Real>& y,
                       const Request& r) {
  if (!net.connected(r.location, 0)) return 0.0;
  return net.weight(r.file, r.location, 0) *
         std::clamp(y[static_cast<std::size_t>(r.file)], 0.0, 1.0);
}

Real xc_single_residual(const CacheNetwork& net, const std::vector<Real>& y) {
  Real r = 0.0, load = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    r = std::max(r, std::max(-y[k], y[k] - 1.0));
    load += net.size_of(static_cast<int>(k)) * y[k];
  }
  return std::max(r, load - net.capacity[0]);
}

}  // namespace

RunResult simulate(const ExperimentConfig& cfg) {
  cfg.validate();
  const CacheNetwork& net = cfg.network;
  const int B = cfg.workload.batch;

  // workload draws
  std::vector<Request> draws;
  std::vector<Real> popularity;
  if (cfg.workload.kind == WorkloadConfig::Kind::Zipf) {
    ZipfSpec zs{net.num_files, cfg.workload.zeta, cfg.seed};
    draws = zipf_stream(zs, cfg.workload.T, net.num_locations, cfg.seed + 101);
    popularity = zipf_probabilities(net.num_files, cfg.workload.zeta);
  } else {
    TraceData td = load_trace(cfg.workload.trace);
    if (td.num_files > net.num_files)
      throw InvalidInput("trace has more files than the configured network");
    draws = std::move(td.requests);
    if (cfg.workload.T > 0 && static_cast<long>(draws.size()) > cfg.workload.T)
      draws.resize(static_cast<std::size_t>(cfg.workload.T));
    if (draws.empty()) throw InvalidInput("trace produced no requests");
    popularity = empirical_popularity(draws, net.num_files);
  }

  SimState st{cfg, net, {}, {}, {}, 0.0};
  st.preds = build_prediction_trace(cfg.predictors, draws, popularity, net.num_files,
                                    cfg.seed + 202);
  st.batches = batch(st.preds.realized, B);
  const long T = static_cast<long>(st.batches.size());
  const long stride = cfg.output.checkpoint_stride > 0 ? cfg.output.checkpoint_stride
                                                       : std::max(1L, T / 500);

  if (cfg.budget.enabled) {
    st.prices = generate_prices(cfg.budget.prices, T, net.num_caches);
    for (const auto& s : st.prices.prices)
      for (Real v : s) st.s_max = std::max(st.s_max, v);
  }

  // policies
  const PolicyKind kind = cfg.policy.kind;
  std::unique_ptr<ObcPolicy> obc;
  std::unique_ptr<OecPolicy> oec;
  std::unique_ptr<OgdPolicy> ogd;
  std::unique_ptr<XcSingleCachePolicy> xcs;
  std::unique_ptr<XcJointPolicy> xcj;
  const int pidx = cfg.predictors.empty() ? -1 : cfg.policy.predictor;

  auto first_optimist_preds = [&]() {
    std::vector<Request> v;
    for (int idx : cfg.policy.optimists) {
      auto pb = predicted_batch(st, idx, 0);
      v.push_back(pb.empty() ? Request{-1, 0, 1} : pb.front());
    }
    return v;
  };

  switch (kind) {
    case PolicyKind::Obc:
      obc = std::make_unique<ObcPolicy>(net, cfg.policy.sigma, B);
      if (pidx >= 0)
        obc->set_initial_prediction(to_gradient_prediction(net, predicted_batch(st, pidx, 0)));
      break;
    case PolicyKind::Pessimist:
      obc = std::make_unique<ObcPolicy>(net, cfg.policy.sigma, B);
      break;
    case PolicyKind::Oec:
      oec = std::make_unique<OecPolicy>(net, cfg.policy.a, cfg.policy.beta, cfg.policy.sigma);
      if (pidx >= 0)
        oec->set_initial_prediction(to_gradient_prediction(net, predicted_batch(st, pidx, 0)));
      break;
    case PolicyKind::Ogd: {
      Real eta = cfg.policy.eta > 0.0 ? cfg.policy.eta : ogd_default_eta(net, T, B);
      ogd = std::make_unique<OgdPolicy>(net, eta);
      break;
    }
    case PolicyKind::Xc:
      if (net.num_caches == 1) {
        xcs = std::make_unique<XcSingleCachePolicy>(
            net, static_cast<int>(cfg.policy.optimists.size()), cfg.policy.meta_sigma,
            cfg.policy.sigma);
        xcs->set_initial_predictions(first_optimist_preds());
      } else {
        xcj = std::make_unique<XcJointPolicy>(
            net, static_cast<int>(cfg.policy.optimists.size()), cfg.policy.meta_sigma);
        xcj->set_initial_predictions(first_optimist_preds());
      }
      break;
  }

  const bool single = net.num_caches == 1;
  std::unique_ptr<SingleCacheBhs> inc;
  if (single) inc = std::make_unique<SingleCacheBhs>(net);

  // elastic comparator: fixed x* from the full horizon, utility replayed per slot
  BhsResult elastic_star;
  if (oec)
    elastic_star = bhs_elastic(net, st.preds.realized, st.prices.prices, st.prices.budgets);

  RunResult res;
  res.T = T;
  Real cum = 0.0, g_sum = 0.0, lambda = 0.0, star_cum = 0.0;
  long requests_seen = 0;

  for (long k = 0; k < T; ++k) {
    const RequestBatch& rb = st.batches[static_cast<std::size_t>(k)];
    const long t = k + 1;
    const bool at_checkpoint = (t % stride == 0) || t == T;

    // utility of the current decision
    Real f_t = 0.0;
    if (xcs) {
      for (const auto& r : rb.requests) f_t += xc_single_utility(net, xcs->current_y(), r);
    } else {
      const DecisionVector& x = obc   ? obc->current()
                                : oec ? oec->current()
                                : ogd ? ogd->current()
                                      : xcj->current();
      f_t = utility(net, rb, x);
    }
    cum += f_t;

    if (at_checkpoint) {
      Real feas = xcs ? xc_single_residual(net, xcs->current_y())
                      : feasibility_residual(
                            net, obc   ? obc->current()
                                 : oec ? oec->current()
                                 : ogd ? ogd->current()
                                       : xcj->current());
      res.max_feasibility_residual = std::max(res.max_feasibility_residual, feas);
    }

    // elastic bookkeeping
    Real g_t = 0.0;
    if (oec) {
      g_t = OecPolicy::storage_cost(net, oec->current(),
                                    st.prices.prices[static_cast<std::size_t>(k)]) -
            st.prices.budgets[static_cast<std::size_t>(k)];
      g_sum += g_t;
      lambda = oec->dual_step(g_t);
      for (const auto& r : rb.requests)
        star_cum += utility(net, r, greedy_routing(net, r, elastic_star.x));
    }

    if (single)
      for (const auto& r : rb.requests) inc->add(r);
    requests_seen += rb.size();

    // advance the policy
    GradientVector obs = gradient(net, rb);
    const bool has_next = k + 1 < T;
    if (obc) {
      GradientVector pn;
      if (has_next && pidx >= 0 && kind == PolicyKind::Obc)
        pn = to_gradient_prediction(net, predicted_batch(st, pidx, static_cast<std::size_t>(k) + 1));
      obc->step(obs, pn);
    } else if (oec) {
      GradientVector pn;
      if (has_next && pidx >= 0)
        pn = to_gradient_prediction(net, predicted_batch(st, pidx, static_cast<std::size_t>(k) + 1));
      oec->step(obs, pn,
                st.prices.prices[static_cast<std::size_t>(has_next ? k + 1 : k)]);
    } else if (ogd) {
      ogd->step(obs);
    } else {
      std::vector<Request> opt_preds;
      for (int idx : cfg.policy.optimists) {
        if (has_next) {
          auto pb = predicted_batch(st, idx, static_cast<std::size_t>(k) + 1);
          opt_preds.push_back(pb.empty() ? Request{-1, 0, t + 1} : pb.front());
        } else {
          opt_preds.push_back(Request{-1, 0, t + 1});
        }
      }
      const Request& r = rb.requests.front();
      if (xcs)
        xcs->step(r, opt_preds);
      else
        xcj->step(r, opt_preds);
    }

    if (at_checkpoint) {
      CheckpointRow row;
      row.t = t;
      row.utility = f_t;
      row.avg_utility = cum / t;
      Real bhs_val;
      if (oec)
        bhs_val = star_cum;
      else
        bhs_val = single ? inc->best_value()
                         : bhs_prefix(net, st.preds.realized, requests_seen).value;
      row.regret = bhs_val - cum;
      row.avg_regret = row.regret / t;
      row.has_regret = true;
      res.bhs_value = bhs_val;
      res.final_regret = row.regret;

      Real h = 0.0;
      if (obc) h = obc->h_cum();
      if (oec) h = oec->h_cum();
      if (xcs) h = xcs->meta_h_cum();
      if (xcj) h = xcj->performance_shift_sq_cum();
      row.h_cum = h;
      res.h_cum = h;

      if (obc || oec) {
        row.bound_thm1 =
            std::sqrt(2.0) * joint_diameter(net, B) * std::sqrt(std::max(h, 0.0));
      }
      if (oec) {
        row.has_violation = true;
        row.violation = std::max(g_sum, 0.0);  // positive part of the accumulated budget gap
        row.lambda = lambda;
        Thm2Params tp;
        tp.D = joint_diameter(net, B);
        tp.a = cfg.policy.a;
        tp.beta = cfg.policy.beta;
        tp.s_max = st.s_max;
        tp.J = net.num_caches;
        tp.C = net.max_capacity();
        row.bound_thm2_R = bound_thm2_regret(tp, h, static_cast<Real>(t));
        row.bound_thm2_V = bound_thm2_violation(tp, h, row.regret, static_cast<Real>(t));
        row.has_bounds2 = true;
        res.final_violation = row.violation;
      }
      if (xcs || xcj) {
        const auto& ecu = xcs ? xcs->expert_cum_utility() : xcj->expert_cum_utility();
        Real shift = xcs ? xcs->performance_shift_sq_cum() : xcj->performance_shift_sq_cum();
        std::vector<Real> eregs(ecu.size());
        for (std::size_t p = 0; p < ecu.size(); ++p) eregs[p] = bhs_val - ecu[p];
        row.bound_thm3 = bound_thm3(shift, eregs);
        row.has_bounds3 = true;
        row.weights = xcs ? xcs->weights() : xcj->weights();
        res.expert_regrets = std::move(eregs);
      }
      res.rows.push_back(std::move(row));
    }
  }
  res.cum_utility = cum;
  return res;
}

std::string metrics_csv(const RunResult& result, int num_experts) {
  std::ostringstream out;
  out << "t,utility,avg_utility,regret,avg_regret,violation,lambda,h_cum,"
         "bound_thm1,bound_thm2_R,bound_thm2_V,bound_thm3";
  for (int p = 0; p < num_experts; ++p) out << ",u_" << p;
  out << "\n";
  for (const auto& r : result.rows) {
    out << r.t << ',' << fmt(r.utility) << ',' << fmt(r.avg_utility) << ',';
    if (r.has_regret)
      out << fmt(r.regret) << ',' << fmt(r.avg_regret) << ',';
    else
      out << ",,";
    if (r.has_violation)
      out << fmt(r.violation) << ',' << fmt(r.lambda) << ',';
    else
      out << ",,";
    out << fmt(r.h_cum) << ',' << fmt(r.bound_thm1) << ',';
    if (r.has_bounds2)
      out << fmt(r.bound_thm2_R) << ',' << fmt(r.bound_thm2_V);
    else
      out << ',';
    out << ',';
    if (r.has_bounds3)
      out << fmt(r.bound_thm3);
    for (int p = 0; p < num_experts; ++p) {
      out << ',';
      if (p < static_cast<int>(r.weights.size())) out << fmt(r.weights[static_cast<std::size_t>(p)]);
    }
    out << "\n";
  }
  return out.str();
}

RunResult run_experiment(const ExperimentConfig& config, const std::string& config_json,
                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  RunResult res = simulate(config);

  int num_experts = 0;
  for (const auto& r : res.rows)
    num_experts = std::max(num_experts, static_cast<int>(r.weights.size()));
  {
    std::ofstream f(fs::path(out_dir) / "metrics.csv", std::ios::binary);
    f << metrics_csv(res, num_experts);
  }
  {
    ordered_json s;
    s["T"] = res.T;
    s["cum_utility"] = res.cum_utility;
    s["bhs_value"] = res.bhs_value;
    s["final_regret"] = res.final_regret;
    s["final_avg_regret"] = res.T > 0 ? res.final_regret / res.T : 0.0;
    s["final_violation"] = res.final_violation;
    s["h_cum"] = res.h_cum;
    s["expert_regrets"] = res.expert_regrets;
    s["max_feasibility_residual"] = res.max_feasibility_residual;
    std::ofstream f(fs::path(out_dir) / "summary.json", std::ios::binary);
    f << s.dump(2) << "\n";
  }
  {
    ordered_json lock;
    lock["seed"] = config.seed;
    json parsed = json::parse(config_json);
    parsed["seed"] = config.seed;  // resolved seed wins over the file value
    lock["config"] = parsed;
    std::ofstream f(fs::path(out_dir) / "run.lock", std::ios::binary);
    f << lock.dump(2) << "\n";
  }
  return res;
}

namespace {

void deep_merge(json& base, const json& overlay) {
  if (!base.is_object() || !overlay.is_object()) {
    base = overlay;
    return;
  }
  for (const auto& [key, value] : overlay.items()) {
    if (base.contains(key) && base[key].is_object() && value.is_object())
      deep_merge(base[key], value);
    else
      base[key] = value;
  }
}

}  // namespace

int run_sweep(const std::string& sweep_json, const std::string& out_dir) {
  namespace fs = std::filesystem;
  json doc;
  try {
    doc = json::parse(sweep_json);
  } catch (const std::exception& e) {
    throw InvalidInput(std::string("sweep: JSON parse failure: ") + e.what());
  }
  expect_keys(doc, {"base", "cells"}, "sweep");
  if (!doc.contains("base")) throw InvalidInput("sweep: missing 'base' config");
  const json& cells = doc.value("cells", json::array());
  if (!cells.is_array()) throw InvalidInput("sweep: 'cells' must be an array");
  fs::create_directories(out_dir);

  std::vector<std::future<bool>> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const json& cell = cells[c];
    expect_keys(cell, {"name", "overrides"}, "sweep cell " + std::to_string(c));
    std::string name = cell.value("name", "cell_" + std::to_string(c));
    json merged = doc["base"];
    if (cell.contains("overrides")) deep_merge(merged, cell["overrides"]);
    std::string cell_dir = (fs::path(out_dir) / name).string();
    std::string cfg_text = merged.dump();
    jobs.push_back(std::async(std::launch::async, [cfg_text, cell_dir]() {
      try {
        ExperimentConfig cfg = parse_config(cfg_text);
        run_experiment(cfg, cfg_text, cell_dir);
        return true;
      } catch (const std::exception& e) {
        std::filesystem::create_directories(cell_dir);
        std::ofstream f(std::filesystem::path(cell_dir) / "error.txt", std::ios::binary);
        f << e.what() << "\n";
        return false;
      }
    }));
  }
  int failures = 0;
  for (auto& j : jobs)
    if (!j.get()) ++failures;
  return failures;
}

}  // namespace optcache

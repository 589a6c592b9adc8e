#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optcache/predictors.hpp"
#include "optcache/types.hpp"
#include "optcache/workloads.hpp"

namespace optcache {

enum class PolicyKind { Obc, Oec, Xc, Ogd, Pessimist };

struct WorkloadConfig {
  enum class Kind { Zipf, Trace };
  Kind kind = Kind::Zipf;
  long T = 0;       // horizon in requests (0 on traces: whole trace)
  int batch = 1;    // B requests per slot
  Real zeta = 1.0;
  TraceSpec trace;
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::Obc;
  Real sigma = 0.0;            // 0: default schedule scale
  int predictor = 0;           // index into the predictor list (obc/oec)
  std::vector<int> optimists;  // predictor indices (xc)
  Real a = 1.0, beta = 0.5;    // oec
  Real eta = 0.0;              // ogd (0: default)
  Real meta_sigma = 0.0;       // xc (0: default)
};

struct BudgetConfig {
  bool enabled = false;
  PriceStreamSpec prices;
};

struct OutputConfig {
  long checkpoint_stride = 0;  // 0: max(1, T/500)
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  CacheNetwork network;
  WorkloadConfig workload;
  std::vector<PredictorSpec> predictors;
  PolicyConfig policy;
  BudgetConfig budget;
  OutputConfig output;

  void validate() const;
};

// Strict parse: unknown keys anywhere in the document are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct CheckpointRow {
  long t = 0;
  Real utility = 0.0, avg_utility = 0.0;
  Real regret = 0.0, avg_regret = 0.0;
  Real violation = 0.0, lambda = 0.0, h_cum = 0.0;
  Real bound_thm1 = 0.0, bound_thm2_R = 0.0, bound_thm2_V = 0.0, bound_thm3 = 0.0;
  bool has_regret = false, has_violation = false, has_bounds2 = false, has_bounds3 = false;
  std::vector<Real> weights;  // expert weights (xc)
};

struct RunResult {
  std::vector<CheckpointRow> rows;
  long T = 0;                 // slots simulated
  Real cum_utility = 0.0;
  Real final_regret = 0.0;
  Real final_violation = 0.0;
  Real h_cum = 0.0;
  Real bhs_value = 0.0;
  std::vector<Real> expert_regrets;
  Real max_feasibility_residual = 0.0;
};

// Runs the full simulation in memory (no files); deterministic in config.
RunResult simulate(const ExperimentConfig& config);

// simulate + write metrics.csv, summary.json, run.lock under out_dir.
RunResult run_experiment(const ExperimentConfig& config, const std::string& config_json,
                         const std::string& out_dir);

// Sweep document: {"base": <config>, "cells": [{"name": ..., "overrides": {...}}]}.
// Cells run concurrently, one output subdirectory per cell; per-cell failures
// are recorded in <cell>/error.txt and do not stop the sweep.
// Returns the number of failed cells.
int run_sweep(const std::string& sweep_json, const std::string& out_dir);

std::string metrics_csv(const RunResult& result, int num_experts);

}  // namespace optcache

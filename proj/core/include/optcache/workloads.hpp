#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optcache/rng.hpp"
#include "optcache/types.hpp"

namespace optcache {

// Zipf popularity: p_k proportional to (k+1)^-zeta, file 0 most popular.
struct ZipfSpec {
  int num_files = 0;
  Real zeta = 1.0;
  std::uint64_t seed = 1;
};

std::vector<Real> zipf_probabilities(int num_files, Real zeta);
std::vector<Request> zipf_stream(const ZipfSpec& spec, long T, int num_locations = 1,
                                 std::uint64_t location_seed = 0);

// Normalized trace CSV: header "slot,file_id,location_id"; location -1 (or a
// missing column) is assigned by the location rule.
struct TraceSpec {
  std::string path;
  int min_requests = 1;
  bool random_locations = false;  // false => use the CSV column
  int num_locations = 1;          // for random assignment
  std::uint64_t seed = 1;
};

struct TraceData {
  std::vector<Request> requests;
  int num_files = 0;  // after filtering and re-indexing
};

TraceData load_trace(const TraceSpec& spec);
TraceData parse_trace_csv(const std::string& content, const TraceSpec& spec);

// Consecutive grouping into batches of size B; the final partial batch is kept.
std::vector<RequestBatch> batch(const std::vector<Request>& stream, int B);

// Per-slot leasing prices and budgets for the elastic model.
struct PriceStreamSpec {
  enum class PriceKind { Uniform, Constant };
  enum class BudgetKind { Normal, Constant };
  PriceKind price_kind = PriceKind::Uniform;
  Real price_value = 1.0;  // constant value or uniform upper bound
  Real price_max = 1.0;    // s bound
  BudgetKind budget_kind = BudgetKind::Constant;
  Real budget_mean = 0.5;
  Real budget_std = 0.05;
  Real budget_scale = 10.0;
  Real budget_value = 0.0;  // constant budget
  std::uint64_t seed = 1;
};

struct PriceStream {
  std::vector<std::vector<Real>> prices;  // T+1 slots, J entries each
  std::vector<Real> budgets;              // T slots
};

PriceStream generate_prices(const PriceStreamSpec& spec, long T, int num_caches);

// Empirical popularity of a request sequence (used by recommenders on traces).
std::vector<Real> empirical_popularity(const std::vector<Request>& requests, int num_files);

}  // namespace optcache

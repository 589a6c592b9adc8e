#include "optcache/workloads.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace optcache {

std::vector<Real> zipf_probabilities(int num_files, Real zeta) {
  if (num_files < 1) throw InvalidInput("zipf: need at least one file");
  if (zeta < 0.0) throw InvalidInput("zipf: negative exponent");
  std::vector<Real> p(static_cast<std::size_t>(num_files));
  Real norm = 0.0;
  for (int k = 0; k < num_files; ++k) {
    p[static_cast<std::size_t>(k)] = std::pow(static_cast<Real>(k + 1), -zeta);
    norm += p[static_cast<std::size_t>(k)];
  }
  for (auto& v : p) v /= norm;
  return p;
}

std::vector<Request> zipf_stream(const ZipfSpec& spec, long T, int num_locations,
                                 std::uint64_t location_seed) {
  if (T < 1) throw InvalidInput("zipf stream: horizon must be positive");
  DiscreteSampler sampler(zipf_probabilities(spec.num_files, spec.zeta));
  Rng rng(spec.seed);
  Rng loc_rng(location_seed ? location_seed : spec.seed + 1);
  std::vector<Request> out;
  out.reserve(static_cast<std::size_t>(T));
  for (long t = 1; t <= T; ++t) {
    Request r;
    r.file = sampler.draw(rng);
    r.location = num_locations > 1
                     ? static_cast<int>(loc_rng.uniform_index(static_cast<std::uint64_t>(num_locations)))
                     : 0;
    r.slot = t;
    out.push_back(r);
  }
  return out;
}

TraceData parse_trace_csv(const std::string& content, const TraceSpec& spec) {
  std::istringstream in(content);
  std::string line;
  long line_no = 0;
  struct Row {
    long slot;
    long file;
    int location;
  };
  std::vector<Row> rows;
  std::map<long, long> counts;

  auto fail = [&](const std::string& what) {
    throw InvalidInput("trace parse error at line " + std::to_string(line_no) + ": " + what);
  };

  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("slot", 0) == 0) continue;  // header row
    }
    Row row{};
    std::istringstream ls(line);
    std::string field;
    if (!std::getline(ls, field, ',')) fail("missing slot");
    try {
      row.slot = std::stol(field);
    } catch (...) {
      fail("bad slot value '" + field + "'");
    }
    if (!std::getline(ls, field, ',')) fail("missing file_id");
    try {
      row.file = std::stol(field);
    } catch (...) {
      fail("bad file_id value '" + field + "'");
    }
    if (std::getline(ls, field, ',')) {
      try {
        row.location = std::stoi(field);
      } catch (...) {
        fail("bad location_id value '" + field + "'");
      }
    } else {
      row.location = -1;
    }
    rows.push_back(row);
    counts[row.file]++;
  }

  // Filter rare files and re-pack ids contiguously (ascending original id).
  std::map<long, int> remap;
  for (const auto& [file, cnt] : counts)
    if (cnt >= spec.min_requests) remap.emplace(file, static_cast<int>(remap.size()));
  if (remap.empty()) throw InvalidInput("trace empty after min-request filter");

  Rng loc_rng(spec.seed);
  TraceData data;
  data.num_files = static_cast<int>(remap.size());
  long slot = 0;
  for (const auto& row : rows) {
    auto it = remap.find(row.file);
    if (it == remap.end()) continue;
    Request r;
    r.file = it->second;
    ++slot;
    r.slot = slot;
    if (spec.random_locations || row.location < 0)
      r.location = spec.num_locations > 1
                       ? static_cast<int>(loc_rng.uniform_index(
                             static_cast<std::uint64_t>(spec.num_locations)))
                       : 0;
    else
      r.location = row.location;
    data.requests.push_back(r);
  }
  return data;
}

TraceData load_trace(const TraceSpec& spec) {
  std::ifstream f(spec.path, std::ios::binary);
  if (!f) throw InvalidInput("cannot open trace file: " + spec.path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_trace_csv(ss.str(), spec);
}

std::vector<RequestBatch> batch(const std::vector<Request>& stream, int B) {
  if (B < 1) throw InvalidInput("batch size must be >= 1");
  std::vector<RequestBatch> out;
  RequestBatch cur;
  long slot = 0;
  for (const auto& r : stream) {
    if (cur.size() == 0) cur.slot = ++slot;
    Request rr = r;
    rr.slot = cur.slot;
    cur.requests.push_back(rr);
    if (cur.size() == B) {
      out.push_back(std::move(cur));
      cur = RequestBatch{};
    }
  }
  if (cur.size() > 0) out.push_back(std::move(cur));
  return out;
}

PriceStream generate_prices(const PriceStreamSpec& spec, long T, int num_caches) {
  Rng rng(spec.seed);
  PriceStream out;
  out.prices.resize(static_cast<std::size_t>(T) + 1);
  for (auto& s : out.prices) {
    s.resize(static_cast<std::size_t>(num_caches));
    for (auto& v : s)
      v = spec.price_kind == PriceStreamSpec::PriceKind::Uniform
              ? rng.uniform(0.0, spec.price_value)
              : spec.price_value;
  }
  out.budgets.resize(static_cast<std::size_t>(T));
  for (auto& b : out.budgets) {
    b = spec.budget_kind == PriceStreamSpec::BudgetKind::Normal
            ? spec.budget_scale * rng.normal(spec.budget_mean, spec.budget_std)
            : spec.budget_value;
    b = std::max(b, 0.0);
  }
  return out;
}

std::vector<Real> empirical_popularity(const std::vector<Request>& requests, int num_files) {
  std::vector<Real> p(static_cast<std::size_t>(num_files), 0.0);
  for (const auto& r : requests) p[static_cast<std::size_t>(r.file)] += 1.0;
  Real total = static_cast<Real>(requests.size());
  if (total > 0)
    for (auto& v : p) v /= total;
  else
    for (auto& v : p) v = 1.0 / num_files;
  return p;
}

}  // namespace optcache

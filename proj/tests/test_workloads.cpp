#include <doctest.h>

#include <numeric>

#include "optcache/workloads.hpp"

using namespace optcache;

TEST_CASE("zipf probabilities are normalized and decreasing") {
  auto p = zipf_probabilities(100, 1.1);
  Real sum = std::accumulate(p.begin(), p.end(), 0.0);
  CHECK(sum == doctest::Approx(1.0));
  for (std::size_t k = 1; k < p.size(); ++k) CHECK(p[k] <= p[k - 1]);
  CHECK(p[0] == doctest::Approx(std::pow(1.0, -1.1) / (sum > 0 ? 1.0 : 1.0) * p[0]));
}

TEST_CASE("zipf stream is deterministic and in range") {
  ZipfSpec spec{50, 1.1, 9};
  auto a = zipf_stream(spec, 200, 4, 77);
  auto b = zipf_stream(spec, 200, 4, 77);
  REQUIRE(a.size() == 200);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].file == b[k].file);
    CHECK(a[k].location == b[k].location);
    CHECK(a[k].file >= 0);
    CHECK(a[k].file < 50);
    CHECK(a[k].location < 4);
    CHECK(a[k].slot == static_cast<long>(k) + 1);
  }
}

TEST_CASE("trace parser handles header, filtering and re-indexing") {
  std::string csv =
      "slot,file_id,location_id\n"
      "1,10,0\n"
      "2,99,1\n"
      "3,10,0\n"
      "4,7,1\n"
      "5,10,1\n";
  TraceSpec spec;
  spec.min_requests = 2;
  TraceData d = parse_trace_csv(csv, spec);
  // only file 10 survives; re-packed to id 0
  CHECK(d.num_files == 1);
  REQUIRE(d.requests.size() == 3);
  for (const auto& r : d.requests) CHECK(r.file == 0);
  CHECK(d.requests[0].slot == 1);
  CHECK(d.requests[2].slot == 3);

  spec.min_requests = 1;
  d = parse_trace_csv(csv, spec);
  CHECK(d.num_files == 3);  // ids re-packed ascending by original id: 7->0, 10->1, 99->2
  CHECK(d.requests[0].file == 1);
  CHECK(d.requests[1].file == 2);
  CHECK(d.requests[3].file == 0);
}

TEST_CASE("trace parser reports malformed rows") {
  TraceSpec spec;
  CHECK_THROWS_AS(parse_trace_csv("slot,file_id,location_id\n1,abc,0\n", spec), InvalidInput);
  CHECK_THROWS_AS(parse_trace_csv("slot,file_id,location_id\n", spec), InvalidInput);
}

TEST_CASE("batching groups consecutively and keeps the tail") {
  std::vector<Request> stream;
  for (int k = 0; k < 7; ++k) stream.push_back({k, 0, k + 1});
  auto batches = batch(stream, 3);
  REQUIRE(batches.size() == 3);
  CHECK(batches[0].size() == 3);
  CHECK(batches[2].size() == 1);
  CHECK(batches[0].slot == 1);
  CHECK(batches[2].slot == 3);
  CHECK(batches[2].requests[0].file == 6);
}

TEST_CASE("price stream is deterministic, bounded and clamped") {
  PriceStreamSpec spec;
  spec.price_kind = PriceStreamSpec::PriceKind::Uniform;
  spec.price_value = 1.0;
  spec.budget_kind = PriceStreamSpec::BudgetKind::Normal;
  spec.budget_mean = 0.5;
  spec.budget_std = 0.05;
  spec.budget_scale = 10.0;
  spec.seed = 5;
  auto a = generate_prices(spec, 100, 2);
  auto b = generate_prices(spec, 100, 2);
  REQUIRE(a.prices.size() == 101);
  REQUIRE(a.budgets.size() == 100);
  for (std::size_t t = 0; t < a.prices.size(); ++t)
    for (int j = 0; j < 2; ++j) {
      CHECK(a.prices[t][static_cast<std::size_t>(j)] >= 0.0);
      CHECK(a.prices[t][static_cast<std::size_t>(j)] <= 1.0);
      CHECK(a.prices[t][static_cast<std::size_t>(j)] ==
            b.prices[t][static_cast<std::size_t>(j)]);
    }
  for (Real bud : a.budgets) {
    CHECK(bud >= 0.0);
    CHECK(bud < 10.0);  // 0.5 mean, tiny std, scale 10
  }
}

TEST_CASE("empirical popularity normalizes counts") {
  std::vector<Request> reqs = {{0, 0, 1}, {0, 0, 2}, {1, 0, 3}, {2, 0, 4}};
  auto p = empirical_popularity(reqs, 4);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[3] == doctest::Approx(0.0));
}

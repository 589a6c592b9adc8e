#include "optcache/predictors.hpp"

#include "optcache/model.hpp"
#include "optcache/rng.hpp"

namespace optcache {

PredictionTrace build_prediction_trace(const std::vector<PredictorSpec>& specs,
                                       const std::vector<Request>& workload_draws,
                                       const std::vector<Real>& popularity,
                                       int num_files, std::uint64_t master_seed) {
  const std::size_t P = specs.size();
  const std::size_t T = workload_draws.size();
  Real rho_total = 0.0;
  for (const auto& s : specs) {
    s.validate();
    if (s.kind == PredictorKind::FollowProb) rho_total += s.rho;
  }
  if (rho_total > 1.0 + 1e-12)
    throw InvalidInput("follow probabilities sum above 1");

  DiscreteSampler pop(popularity);
  Rng master(master_seed);
  std::vector<Rng> rec_rngs;
  rec_rngs.reserve(P);
  for (const auto& s : specs) rec_rngs.emplace_back(s.seed);

  PredictionTrace out;
  out.realized.resize(T);
  out.predicted.assign(P, std::vector<Request>(T));

  for (std::size_t t = 0; t < T; ++t) {
    // recommendations commit before the request is realized
    std::vector<int> rec(P, -1);
    for (std::size_t p = 0; p < P; ++p)
      if (specs[p].kind == PredictorKind::FollowProb)
        rec[p] = pop.empty() ? 0 : pop.draw(rec_rngs[p]);

    Request realized = workload_draws[t];
    Real u = master.uniform();
    Real acc = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      if (specs[p].kind != PredictorKind::FollowProb) continue;
      acc += specs[p].rho;
      if (u < acc) {
        realized.file = rec[p];
        break;
      }
    }
    out.realized[t] = realized;

    for (std::size_t p = 0; p < P; ++p) {
      Request pr = realized;
      switch (specs[p].kind) {
        case PredictorKind::Oracle:
          break;  // perfect hint
        case PredictorKind::FollowProb:
          pr.file = rec[p];
          break;
        case PredictorKind::Alternating: {
          // on-phase slots predict the realized request, off-phase a wrong file
          long phase = (static_cast<long>(t) / specs[p].period) % 2;
          if (phase == 1) pr.file = (realized.file + 1) % num_files;
          break;
        }
        case PredictorKind::Adversarial:
          pr.file = (realized.file + 1) % num_files;
          break;
        case PredictorKind::Zero:
          pr.file = -1;
          break;
      }
      out.predicted[p][t] = pr;
    }
  }
  return out;
}

GradientVector to_gradient_prediction(const CacheNetwork& net, const Request& predicted) {
  if (predicted.file < 0) return GradientVector{};
  return gradient(net, predicted);
}

GradientVector to_gradient_prediction(const CacheNetwork& net,
                                      const std::vector<Request>& predicted_batch) {
  RequestBatch b;
  for (const auto& r : predicted_batch)
    if (r.file >= 0) b.requests.push_back(r);
  if (b.requests.empty()) return GradientVector{};
  return gradient(net, b);
}

}  // namespace optcache

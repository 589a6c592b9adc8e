#pragma once

#include <cstdint>
#include <vector>

#include "optcache/types.hpp"

namespace optcache {

enum class PredictorKind { Oracle, FollowProb, Alternating, Adversarial, Zero };

struct PredictorSpec {
  PredictorKind kind = PredictorKind::Zero;
  Real rho = 0.0;        // follow probability
  long period = 1;       // alternating half-period (slots)
  std::uint64_t seed = 1;

  void validate() const {
    if (rho < 0.0 || rho > 1.0) throw InvalidInput("predictor: rho outside [0,1]");
    if (period < 1) throw InvalidInput("predictor: period must be >= 1");
  }
};

// Predicted request per predictor and slot; file == -1 means "no prediction"
// (a zero gradient hint).
struct PredictionTrace {
  std::vector<Request> realized;
  std::vector<std::vector<Request>> predicted;  // [predictor][slot]
};

// Runs the recommendation protocol over a pre-drawn workload stream: each
// follow-prob predictor first commits a recommendation drawn from the
// popularity law; with probability rho the realized request is replaced by
// that recommendation, otherwise the workload draw stands.
PredictionTrace build_prediction_trace(const std::vector<PredictorSpec>& specs,
                                       const std::vector<Request>& workload_draws,
                                       const std::vector<Real>& popularity,
                                       int num_files, std::uint64_t master_seed);

// Gradient-space prediction for a predicted request (same construction as
// the realized gradient). file == -1 yields the zero vector.
GradientVector to_gradient_prediction(const CacheNetwork& net, const Request& predicted);
GradientVector to_gradient_prediction(const CacheNetwork& net,
                                      const std::vector<Request>& predicted_batch);

}  // namespace optcache

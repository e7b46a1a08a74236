#pragma once

// Leave-one-site-out cross-validation of the amplitude-phase predictor and the
// ordinary kriging baseline, scored by five error measures.

#include <apsf/kriging.hpp>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace apsf {

enum class Method { apk, ok };

const char* method_name(Method m);

/// E1 aligned squared L2, E2 aligned squared L2 of derivatives, E3 squared
/// amplitude distance, E4 squared intrinsic phase distance, E5 raw squared L2.
using ErrorMetrics = std::array<double, 5>;

ErrorMetrics prediction_errors(const SampledFunction& prediction, const SampledFunction& truth);

/// Predicts one site from the remaining data using `method`.
SampledFunction predict_at(const SpatialDataset& training, const Site& target, Method method,
                           const KrigingConfig& config, ShapeDistanceCache* cache = nullptr);

struct FoldResult {
  std::size_t index = 0;
  std::string site_id;
  bool ok = false;
  std::string error;
  ErrorMetrics metrics{};
  std::optional<SampledFunction> prediction;
};

struct LoocvReport {
  Method method = Method::apk;
  std::vector<FoldResult> folds;
  ErrorMetrics mean{};  ///< over successful folds only
  std::size_t failed = 0;
};

struct LoocvOptions {
  /// Called with each fold's training set before prediction (instrumentation hook).
  std::function<void(std::size_t held_out, const SpatialDataset& training)> on_fold;
  bool keep_predictions = false;
  unsigned threads = 0;
};

LoocvReport loocv_metrics(const SpatialDataset& dataset, const KrigingConfig& config, Method method,
                          const LoocvOptions& options = {}, ShapeDistanceCache* cache = nullptr);

}  // namespace apsf

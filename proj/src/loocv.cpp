#include <apsf/loocv.hpp>
#include <apsf/parallel.hpp>

#include <cmath>

namespace apsf {

const char* method_name(Method m) { return m == Method::apk ? "apk" : "ok"; }

ErrorMetrics prediction_errors(const SampledFunction& prediction, const SampledFunction& truth) {
  if (!(prediction.grid() == truth.grid())) throw InvalidInput("prediction_errors: grids differ");
  const Grid& grid = truth.grid();
  const SrsfFunction q_pred = srsf_transform(prediction);
  const SrsfFunction q_true = srsf_transform(truth);

  // Align the prediction to the truth: gamma minimises |q_true - (q_pred, gamma)|.
  const AlignmentResult to_truth = dp_align(q_true, q_pred);
  const SampledFunction aligned = compose(prediction, to_truth.warp);
  const double e1 = inner(grid, aligned.values() - truth.values(), aligned.values() - truth.values());
  const Vector dd = derivative(aligned) - derivative(truth);
  const double e2 = inner(grid, dd, dd);

  const AlignmentResult amp = dp_align(q_pred, q_true);
  const double e3 = amp.cost * amp.cost;
  const double e4 = std::pow(phase_distances(amp.warp).intrinsic, 2);
  const Vector raw = prediction.values() - truth.values();
  const double e5 = inner(grid, raw, raw);
  return {e1, e2, e3, e4, e5};
}

SampledFunction predict_at(const SpatialDataset& training, const Site& target, Method method,
                           const KrigingConfig& config, ShapeDistanceCache* cache) {
  if (method == Method::apk) return amplitude_phase_krige(training, target, config, cache).combined;
  return ordinary_krige_functional(training, target, config.binning);
}

LoocvReport loocv_metrics(const SpatialDataset& dataset, const KrigingConfig& config, Method method,
                          const LoocvOptions& options, ShapeDistanceCache* cache) {
  if (dataset.size() < 3) throw InsufficientData("loocv_metrics: need at least three sites");
  dataset.validate();
  LoocvReport report;
  report.method = method;
  report.folds.resize(dataset.size());

  parallel_for(
      dataset.size(),
      [&](std::size_t i) {
        FoldResult& fold = report.folds[i];
        fold.index = i;
        fold.site_id = dataset.ids[i];
        try {
          const SpatialDataset training = dataset.without(i);
          if (options.on_fold) options.on_fold(i, training);
          KrigingConfig fold_config = config;
          fold_config.seed = config.seed ^ (0x9E3779B97F4A7C15ULL * (i + 1));
          const SampledFunction& truth = dataset.functions[i];
          SampledFunction pred = predict_at(training, truth.site(), method, fold_config, cache);
          fold.metrics = prediction_errors(pred, truth);
          if (options.keep_predictions) fold.prediction = std::move(pred);
          fold.ok = true;
        } catch (const std::exception& e) {
          fold.ok = false;
          fold.error = e.what();
        }
      },
      options.threads);

  std::size_t good = 0;
  for (const auto& f : report.folds) {
    if (!f.ok) {
      ++report.failed;
      continue;
    }
    ++good;
    for (std::size_t k = 0; k < 5; ++k) report.mean[k] += f.metrics[k];
  }
  for (auto& m : report.mean) m = good > 0 ? m / static_cast<double>(good) : std::nan("");
  return report;
}

}  // namespace apsf

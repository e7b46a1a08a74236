#pragma once

// Three-stage spatial prediction of functional data: iterative amplitude
// kriging, positive-weight phase kriging on the sphere of psi functions, and
// scalar kriging of the starting value, recombined into one function.
// Also hosts the plain functional ordinary kriging baseline.

#include <apsf/dataset.hpp>
#include <apsf/metrics.hpp>
#include <apsf/variogram.hpp>

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace apsf {

struct KrigingConfig {
  int max_iterations = 20;
  double tolerance = 1e-6;
  std::vector<double> lambda_grid{0.0, 0.01, 0.1, 1.0, 10.0};
  std::vector<double> omega_candidates = default_omega_candidates();
  /// Lower bound for phase weights (positivity repair).
  double weight_floor = 1e-6;
  std::uint64_t seed = 0;
  int cv_folds = 5;
  int cv_repeats = 3;
  BinConfig binning{};
  AlignOptions align{};

  void validate() const;
};

struct WeightSolution {
  Vector weights;
  bool regularized = false;      ///< diagonal jitter was needed
  bool fallback_uniform = false;  ///< positivity repair clamped everything
};

/// Minimises w' V w subject to sum(w) = 1 through the Lagrange system.
WeightSolution solve_sum_one_weights(const Matrix& v);

/// Same objective restricted to w >= floor. Starts from the equality-constrained
/// optimum and clamps violators to `floor` until none remain; a clamped weight
/// is never released, so the result can be sub-optimal.
WeightSolution solve_positive_weights(const Matrix& v, double floor);

/// Entries V(h_0j) + V(h_i0) - V(h_ij).
Matrix kriging_matrix(const VariogramModel& model, const Matrix& pair_distances, const Vector& target_distances);

/// Fits the model to `emp`, or when there are too few bins falls back to an
/// exponential model with range equal to the largest pair distance.
VariogramModel fit_or_fallback(const EmpiricalVariogram& emp, const Matrix& pair_distances);

/// Weights for a sum-one predictor whose variogram is estimated from the
/// pairwise squared value distances.
WeightSolution ordinary_weights(const Matrix& pair_distances, const Vector& target_distances,
                                const Matrix& sq_value_distances, const BinConfig& binning,
                                VariogramModel* model_out = nullptr, EmpiricalVariogram* empirical_out = nullptr);

/// Memoised symmetrised shape distances keyed by site id. Safe to share between threads.
class ShapeDistanceCache {
 public:
  double get(const std::string& id_a, const SrsfFunction& a, const std::string& id_b, const SrsfFunction& b);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, double> values_;
};

double symmetric_shape_distance(const SrsfFunction& a, const SrsfFunction& b);

struct AmplitudeKrigingResult {
  SrsfFunction amplitude;
  Vector weights;
  std::vector<WarpingFunction> phases;  ///< warps aligning each q_i to the final template
  VariogramModel model;
  EmpiricalVariogram empirical;
  int iterations = 0;
  bool converged = false;
  double last_change = 0.0;
  bool regularized = false;
};

AmplitudeKrigingResult amplitude_krige(const std::vector<SrsfFunction>& qs, const std::vector<Site>& sites,
                                       const Site& target, const KrigingConfig& config);
AmplitudeKrigingResult amplitude_krige(const SpatialDataset& dataset, const Site& target,
                                       const KrigingConfig& config);

struct PhaseKrigingResult {
  WarpingFunction phase;
  PsiFunction psi;  ///< projected onto the unit sphere
  Vector weights;
  VariogramModel model;
  EmpiricalVariogram empirical;
  bool fallback_uniform = false;
};

/// Linear combination of psi functions with positive sum-one weights from the
/// phase variogram on enlarged-domain distances, projected back to the sphere.
PhaseKrigingResult phase_krige(const std::vector<PsiFunction>& psis, const Matrix& pair_distances,
                               const Vector& target_distances, const KrigingConfig& config);

PhaseKrigingResult phase_krige(const std::vector<PsiFunction>& psis, const std::vector<EnlargedPoint>& points,
                               const EnlargedPoint& target, double omega, const KrigingConfig& config);

struct PhaseStageResult {
  PhaseKrigingResult kriging;
  double omega = 0.0;
  double lambda = 0.0;
  std::vector<double> lambda_losses;
  std::vector<PsiFunction> psis;
};

/// Re-aligns every q_i to the amplitude prediction with the penalised DP
/// (lambda picked by repeated k-fold CV on extrinsic phase loss), selects
/// omega, and kriges the phase at the target.
PhaseStageResult krige_phase_stage(const std::vector<SrsfFunction>& qs, const std::vector<std::string>& ids,
                                   const std::vector<Site>& sites, const SrsfFunction& amplitude,
                                   const Site& target, const KrigingConfig& config,
                                   ShapeDistanceCache* cache = nullptr);

/// Ordinary kriging of scalar starting values.
double translation_krige(const std::vector<double>& starts, const std::vector<Site>& sites, const Site& target,
                         const BinConfig& binning = {});

/// f* = inverse SRSF of (amplitude, phase^{-1}) started at `translation`.
SampledFunction combine_prediction(const SrsfFunction& amplitude, const WarpingFunction& phase, double translation,
                                   const Site& target = Site::Zero());

struct KrigingResult {
  SrsfFunction amplitude;
  WarpingFunction phase;
  double translation = 0.0;
  SampledFunction combined;
  Vector amp_weights;
  Vector phase_weights;
  int iterations = 0;
  bool converged = false;
  double omega = 0.0;
  double lambda = 0.0;
  VariogramModel amplitude_model;
  VariogramModel phase_model;
  EmpiricalVariogram amplitude_empirical;
  EmpiricalVariogram phase_empirical;
};

KrigingResult amplitude_phase_krige(const SpatialDataset& dataset, const Site& target, const KrigingConfig& config,
                                    ShapeDistanceCache* cache = nullptr);

/// Functional ordinary kriging on the raw functions (trace-variogram, no alignment).
SampledFunction ordinary_krige_functional(const SpatialDataset& dataset, const Site& target,
                                          const BinConfig& binning = {}, Vector* weights_out = nullptr,
                                          VariogramModel* model_out = nullptr,
                                          EmpiricalVariogram* empirical_out = nullptr);

}  // namespace apsf

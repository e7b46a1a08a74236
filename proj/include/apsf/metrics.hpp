#pragma once

// Pairwise elastic alignment by dynamic programming, and the amplitude, shape
// and phase distances built on it.

#include <apsf/fdcore.hpp>

#include <utility>
#include <vector>

namespace apsf {

/// One admissible DP move: advance `dt` nodes in time and `dg` nodes in warp value.
struct DpStep {
  int dt;
  int dg;
};

/// Coprime (dt, dg) pairs with both entries <= max_step, ordered by closeness
/// to the diagonal. max_step = 6 gives the usual 23-direction neighbourhood.
std::vector<DpStep> dp_steps(int max_step = 6);

struct AlignOptions {
  int max_step = 6;
  /// Weight of the ||psi - 1||^2 roughness penalty; 0 is plain alignment.
  double lambda = 0.0;
};

struct AlignmentResult {
  WarpingFunction warp;
  SrsfFunction aligned;
  /// Square root of the minimised DP objective. Without a penalty this is the
  /// achieved L2 distance ||q1 - (q2, warp)|| under the piecewise-linear quadrature.
  double cost;
};

/// argmin over lattice warps of ||q1 - (q2, gamma)||; q2 is moved onto q1.
AlignmentResult dp_align(const SrsfFunction& q1, const SrsfFunction& q2, const AlignOptions& options = {});

/// Same lattice with objective ||q1 - (q2,gamma)||^2 + lambda ||psi - 1||^2.
AlignmentResult penalized_align(const SrsfFunction& q1, const SrsfFunction& q2, double lambda,
                                const AlignOptions& options = {});

/// Squared DP objective of a fixed lattice path (nodes as (time index, warp index)).
/// Exposed for diagnostics; the DP minimises exactly this quantity.
double lattice_path_objective(const SrsfFunction& q1, const SrsfFunction& q2,
                              const std::vector<std::pair<int, int>>& path, double lambda = 0.0);

struct PhaseDistances {
  double intrinsic;  ///< arccos<psi*, 1>, in [0, pi/2]
  double extrinsic;  ///< ||psi* - 1||
};

double amplitude_distance(const SrsfFunction& q1, const SrsfFunction& q2);

/// Amplitude distance between unit-norm rescalings; throws DegenerateInput on a zero-norm argument.
double shape_distance(const SrsfFunction& q1, const SrsfFunction& q2);

PhaseDistances phase_distance(const SrsfFunction& q1, const SrsfFunction& q2);

/// Distances of a relative phase from the identity.
PhaseDistances phase_distances(const WarpingFunction& relative_phase);
PhaseDistances phase_distances(const PsiFunction& psi);

/// ||psi1 - psi2||.
double extrinsic_distance(const PsiFunction& a, const PsiFunction& b);

}  // namespace apsf

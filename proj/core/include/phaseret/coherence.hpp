#pragma once

#include <utility>
#include <vector>

#include "phaseret/numerics.hpp"

namespace phaseret {

/// Partition of measurement indices {0..m-1} into coherently acquired groups.
/// The first index of each group is its anchor; a fully incoherent sample is a
/// singleton group.
struct CoherenceStructure {
  std::vector<std::vector<int>> groups;
  int m = 0;

  int group_count() const { return static_cast<int>(groups.size()); }
  int anchor(int g) const { return groups[static_cast<std::size_t>(g)].front(); }

  static CoherenceStructure singletons(int m);
  /// Validates that `groups` is an exact partition of {0..m-1} with no empty group.
  static CoherenceStructure from_groups(std::vector<std::vector<int>> groups);
};

/// The phaseless observables: measured magnitudes |b| and, per measurement,
/// its phase relative to its group anchor in (-pi, pi] (anchors exactly 0).
struct MagnitudePhaseData {
  RealVector magnitudes;
  RealVector phase_diffs;
};

/// P1 = [I 0] extracts z from the stacked unknowns, P2 = [0 I] extracts psi.
struct SelectorPair {
  ComplexMatrix P1;
  ComplexMatrix P2;
};

/// Result of the four-magnitude interferometric phase recovery. `indeterminate`
/// is set when both arctangent arguments vanish (one of the signals is zero).
struct PhaseDifference {
  double angle = 0.0;
  bool indeterminate = false;
};

struct AugmentedSystem {
  ComplexMatrix A;
  RealVector magnitudes;
};

/// Wraps an angle to the principal interval (-pi, pi].
double wrap_angle(double radians);

/// m x m diagonal matrix holding the measured magnitudes.
ComplexMatrix build_B(const MagnitudePhaseData& data);

/// m x q matrix with exactly one unit-magnitude entry per row: e^{j dphi_k} in
/// the column of measurement k's group.
ComplexMatrix build_C(const CoherenceStructure& structure, const MagnitudePhaseData& data);

SelectorPair build_selectors(int n, int q);

/// Phase of a1*conj(a2) from the four intensities |a1|^2, |a2|^2, |a1+a2|^2,
/// |a1+j a2|^2, via the two-argument arctangent.
PhaseDifference interferometric_phase(double o1, double o2, double o3, double o4);

/// Stacks blocks and, per coherent pair (i, j), appends the linear-combination
/// blocks A_i + A_j and A_i + j A_j; the right-hand side is the elementwise
/// magnitude of the correspondingly stacked measurement vector. With no pairs
/// this degenerates to the plain incoherent stack.
AugmentedSystem build_augmented_system(const std::vector<ComplexMatrix>& A_blocks,
                                       const std::vector<ComplexVector>& b_blocks,
                                       const std::vector<std::pair<int, int>>& coherent_pairs);

/// Data-driven variant for when only magnitudes and intra-group phase
/// differences are available: each non-anchor group member j contributes the
/// combination rows (A_a + e^{-j dphi_j} A_j) and (A_a + j e^{-j dphi_j} A_j)
/// with magnitudes |b_a| + |b_j| and hypot(|b_a|, |b_j|).
AugmentedSystem build_augmented_system(const ComplexMatrix& A, const MagnitudePhaseData& data,
                                       const CoherenceStructure& structure);

/// Synthesizes the phaseless observables a multi-channel receiver would report
/// from a ground-truth complex measurement vector.
MagnitudePhaseData extract_phase_data(const ComplexVector& b_true,
                                      const CoherenceStructure& structure);

}  // namespace phaseret

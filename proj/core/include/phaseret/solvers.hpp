#pragma once

#include <optional>

#include "phaseret/coherence.hpp"
#include "phaseret/lbfgs.hpp"
#include "phaseret/numerics.hpp"

namespace phaseret {

/// z-tilde = [z; psi]: source coefficients plus per-group phase unknowns.
/// After a successful linear solve anchored at group s, psi[s] == 1 exactly.
struct StackedUnknowns {
  ComplexVector z;
  ComplexVector psi;
};

struct NonconvexSettings {
  int max_iterations = 2000;
  int memory = 10;
  double gradient_tolerance = 1e-12;
  LineSearchParams line_search;
};

struct SolveReport {
  StackedUnknowns solution;  // psi is empty for the nonconvex paths
  int iterations_used = 0;
  double final_objective = 0.0;
  int anchor_index = -1;
  bool condition_warning = false;  // under-determined or rank-deficient system
  bool converged = true;
};

/// Group whose anchor has the largest magnitude; ties break to the lowest index.
int choose_anchor(const CoherenceStructure& structure, const MagnitudePhaseData& data);

/// The linear partial-coherence solve: builds M = [A, -B C] over [z; psi],
/// eliminates psi_s = 1 by moving its column to the right-hand side, solves the
/// m x (n+q-1) least-squares problem and reassembles the stacked unknowns.
SolveReport solve_linear_pc(const ComplexMatrix& A, const MagnitudePhaseData& data,
                            const CoherenceStructure& structure, int s);

/// Spectral start vector: leading eigenvector of (1/m) A^H diag(|b|^2) A by
/// power iteration, scaled by sqrt(sum |b_k|^2 / sum ||a_k||^2).
ComplexVector spectral_initialize(const ComplexMatrix& A, const RealVector& magnitudes,
                                  int iterations = 40);

/// Intensity least-squares objective f(z) = (1/2m) sum_k (|(Az)_k|^2 - |b_k|^2)^2.
double nonconvex_objective(const ComplexMatrix& A, const RealVector& magnitudes,
                           const ComplexVector& z);

/// Wirtinger gradient (1/m) A^H [ (|Az|^2 - |b|^2) o (Az) ]. The real gradient
/// over the stacked (Re z, Im z) coordinates is twice its real/imaginary parts.
ComplexVector nonconvex_gradient(const ComplexMatrix& A, const RealVector& magnitudes,
                                 const ComplexVector& z);

/// Quasi-Newton (L-BFGS) descent on the intensity objective from z0, complex
/// variables handled by real-imaginary stacking. Non-convergence within the
/// iteration cap is reported, not thrown; the best iterate is returned.
SolveReport solve_nonconvex(const ComplexMatrix& A, const RealVector& magnitudes,
                            const ComplexVector& z0, const NonconvexSettings& settings = {});

/// Refinement of a linear solve: renormalizes the recovered group phases to
/// unit magnitude, rebuilds b-hat = B C (psi/|psi|) and re-solves coherently.
/// Returns nullopt (skip signal) when psi has a zero entry.
std::optional<ComplexVector> coherent_resolve(const ComplexMatrix& A,
                                              const MagnitudePhaseData& data,
                                              const CoherenceStructure& structure,
                                              const ComplexVector& psi);

}  // namespace phaseret

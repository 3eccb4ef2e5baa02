#pragma once

#include <vector>

#include "phaseret/numerics.hpp"

namespace phaseret {

/// Floor applied to dB values when serializing; -inf maps to this value.
inline constexpr double kDbFloor = -400.0;

struct DeviationReport {
  double epsilon_c_db = 0.0;
  double epsilon_m_db = 0.0;
  double aligned_phase_rad = 0.0;  // global phase removed inside epsilon_c
};

/// Phase theta* minimizing ||e^{-j theta} predicted - reference||.
double aligned_phase(const ComplexVector& predicted, const ComplexVector& reference);

/// Relative complex deviation in dB with the optimal global phase removed:
/// 20 log10(||e^{-j theta*} predicted - reference|| / ||reference||).
/// Returns -inf when the aligned difference is exactly zero.
double epsilon_c(const ComplexVector& predicted, const ComplexVector& reference);

/// Relative magnitude deviation in dB:
/// 20 log10(|| |predicted| - |reference| || / ||reference||).
double epsilon_m(const ComplexVector& predicted, const ComplexVector& reference);

DeviationReport compare_fields(const ComplexVector& predicted, const ComplexVector& reference);

/// Fraction of deviations strictly below the threshold.
double success_rate(const std::vector<double>& deviations_db, double threshold_db = -90.0);

/// Per-angle deviation between two patterns on the same grid. Both are first
/// normalized by their complex value at the peak-magnitude angle (unit
/// magnitude, zero phase at the peak), then 20 log10 |result - reference|.
std::vector<double> ff_cut_deviation(const ComplexVector& result_pattern,
                                     const ComplexVector& reference_pattern);

/// Clamp for CSV output: finite values below kDbFloor (and -inf) become kDbFloor.
double db_floor(double value_db);

}  // namespace phaseret

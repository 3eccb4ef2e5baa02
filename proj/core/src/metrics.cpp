#include "phaseret/metrics.hpp"

#include <cmath>
#include <limits>

namespace phaseret {

namespace {

void check_pair(const ComplexVector& predicted, const ComplexVector& reference) {
  if (predicted.size() != reference.size()) {
    throw std::invalid_argument("metrics: vectors of unequal length");
  }
  if (reference.size() == 0 || reference.norm() == 0.0) {
    throw std::invalid_argument("metrics: zero reference");
  }
}

double to_db(double num, double den) {
  if (num == 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  return 20.0 * std::log10(num / den);
}

}  // namespace

double aligned_phase(const ComplexVector& predicted, const ComplexVector& reference) {
  check_pair(predicted, reference);
  const Complex ip = (reference.conjugate().array() * predicted.array()).sum();
  if (ip == Complex(0.0, 0.0)) {
    return 0.0;  // alignment has no effect; any phase is optimal
  }
  return std::arg(ip);
}

double epsilon_c(const ComplexVector& predicted, const ComplexVector& reference) {
  const double theta = aligned_phase(predicted, reference);
  const Complex rot = std::polar(1.0, -theta);
  const double num = (rot * predicted - reference).norm();
  return to_db(num, reference.norm());
}

double epsilon_m(const ComplexVector& predicted, const ComplexVector& reference) {
  check_pair(predicted, reference);
  const double num = (predicted.cwiseAbs() - reference.cwiseAbs()).norm();
  return to_db(num, reference.norm());
}

DeviationReport compare_fields(const ComplexVector& predicted, const ComplexVector& reference) {
  DeviationReport rep;
  rep.aligned_phase_rad = aligned_phase(predicted, reference);
  const Complex rot = std::polar(1.0, -rep.aligned_phase_rad);
  rep.epsilon_c_db = to_db((rot * predicted - reference).norm(), reference.norm());
  rep.epsilon_m_db = epsilon_m(predicted, reference);
  return rep;
}

double success_rate(const std::vector<double>& deviations_db, double threshold_db) {
  if (deviations_db.empty()) {
    throw std::invalid_argument("success_rate: empty deviation list");
  }
  std::size_t hits = 0;
  for (double d : deviations_db) {
    if (d < threshold_db) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(deviations_db.size());
}

std::vector<double> ff_cut_deviation(const ComplexVector& result_pattern,
                                     const ComplexVector& reference_pattern) {
  if (result_pattern.size() != reference_pattern.size() || reference_pattern.size() == 0) {
    throw std::invalid_argument("ff_cut_deviation: angle grid mismatch");
  }
  Eigen::Index peak_res = 0;
  Eigen::Index peak_ref = 0;
  result_pattern.cwiseAbs().maxCoeff(&peak_res);
  reference_pattern.cwiseAbs().maxCoeff(&peak_ref);
  const Complex pr = result_pattern[peak_res];
  const Complex pf = reference_pattern[peak_ref];
  if (pf == Complex(0.0, 0.0)) {
    throw std::invalid_argument("ff_cut_deviation: identically zero reference pattern");
  }
  std::vector<double> out(static_cast<std::size_t>(result_pattern.size()));
  for (Eigen::Index i = 0; i < result_pattern.size(); ++i) {
    const Complex rn = (pr == Complex(0.0, 0.0)) ? Complex(0.0, 0.0) : result_pattern[i] / pr;
    const Complex fn = reference_pattern[i] / pf;
    const double diff = std::abs(rn - fn);
    out[static_cast<std::size_t>(i)] =
        diff == 0.0 ? -std::numeric_limits<double>::infinity() : 20.0 * std::log10(diff);
  }
  return out;
}

double db_floor(double value_db) {
  if (!(value_db > kDbFloor)) {  // catches -inf and NaN
    return kDbFloor;
  }
  return value_db;
}

}  // namespace phaseret

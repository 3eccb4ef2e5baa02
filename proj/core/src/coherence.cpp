#include "phaseret/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace phaseret {

namespace {

constexpr double kPi = std::numbers::pi;

void check_consistency(const CoherenceStructure& structure, const MagnitudePhaseData& data) {
  if (data.magnitudes.size() != structure.m || data.phase_diffs.size() != structure.m) {
    throw std::invalid_argument("coherence: data length does not match structure (m=" +
                                std::to_string(structure.m) + ")");
  }
}

}  // namespace

CoherenceStructure CoherenceStructure::singletons(int m) {
  if (m < 1) {
    throw std::invalid_argument("CoherenceStructure: m must be >= 1");
  }
  CoherenceStructure s;
  s.m = m;
  s.groups.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    s.groups[static_cast<std::size_t>(i)] = {i};
  }
  return s;
}

CoherenceStructure CoherenceStructure::from_groups(std::vector<std::vector<int>> groups) {
  if (groups.empty()) {
    throw std::invalid_argument("CoherenceStructure: no groups");
  }
  int m = 0;
  for (const auto& g : groups) {
    if (g.empty()) {
      throw std::invalid_argument("CoherenceStructure: empty group");
    }
    m += static_cast<int>(g.size());
  }
  std::vector<char> seen(static_cast<std::size_t>(m), 0);
  for (const auto& g : groups) {
    for (int idx : g) {
      if (idx < 0 || idx >= m) {
        throw std::invalid_argument("CoherenceStructure: index " + std::to_string(idx) +
                                    " outside [0, " + std::to_string(m) + ")");
      }
      if (seen[static_cast<std::size_t>(idx)]) {
        throw std::invalid_argument("CoherenceStructure: index " + std::to_string(idx) +
                                    " appears twice");
      }
      seen[static_cast<std::size_t>(idx)] = 1;
    }
  }
  CoherenceStructure s;
  s.groups = std::move(groups);
  s.m = m;
  return s;
}

double wrap_angle(double radians) {
  double w = std::remainder(radians, 2.0 * kPi);
  if (w <= -kPi) {
    w = kPi;
  }
  return w;
}

ComplexMatrix build_B(const MagnitudePhaseData& data) {
  const auto m = data.magnitudes.size();
  ComplexMatrix B = ComplexMatrix::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    B(k, k) = Complex(data.magnitudes[k], 0.0);
  }
  return B;
}

ComplexMatrix build_C(const CoherenceStructure& structure, const MagnitudePhaseData& data) {
  check_consistency(structure, data);
  const int q = structure.group_count();
  ComplexMatrix C = ComplexMatrix::Zero(structure.m, q);
  for (int g = 0; g < q; ++g) {
    for (int k : structure.groups[static_cast<std::size_t>(g)]) {
      C(k, g) = std::polar(1.0, data.phase_diffs[k]);
    }
  }
  return C;
}

SelectorPair build_selectors(int n, int q) {
  if (n < 1 || q < 1) {
    throw std::invalid_argument("build_selectors: n and q must be >= 1");
  }
  SelectorPair p;
  p.P1 = ComplexMatrix::Zero(n, n + q);
  p.P1.leftCols(n) = ComplexMatrix::Identity(n, n);
  p.P2 = ComplexMatrix::Zero(q, n + q);
  p.P2.rightCols(q) = ComplexMatrix::Identity(q, q);
  return p;
}

PhaseDifference interferometric_phase(double o1, double o2, double o3, double o4) {
  const double im = o4 - o1 - o2;  // 2 Im(a1 conj(a2))
  const double re = o3 - o1 - o2;  // 2 Re(a1 conj(a2))
  if (im == 0.0 && re == 0.0) {
    return {0.0, true};
  }
  double angle = std::atan2(im, re);
  if (angle == -kPi) {
    angle = kPi;
  }
  return {angle, false};
}

AugmentedSystem build_augmented_system(const std::vector<ComplexMatrix>& A_blocks,
                                       const std::vector<ComplexVector>& b_blocks,
                                       const std::vector<std::pair<int, int>>& coherent_pairs) {
  if (A_blocks.empty() || A_blocks.size() != b_blocks.size()) {
    throw std::invalid_argument("build_augmented_system: need matching, nonempty block lists");
  }
  const auto n = A_blocks.front().cols();
  Eigen::Index rows = 0;
  for (std::size_t i = 0; i < A_blocks.size(); ++i) {
    if (A_blocks[i].cols() != n) {
      throw std::invalid_argument("build_augmented_system: inconsistent column counts");
    }
    if (A_blocks[i].rows() != b_blocks[i].size()) {
      throw std::invalid_argument("build_augmented_system: block " + std::to_string(i) +
                                  " rows do not match its measurements");
    }
    rows += A_blocks[i].rows();
  }
  const int nblocks = static_cast<int>(A_blocks.size());
  for (const auto& [i, j] : coherent_pairs) {
    if (i < 0 || j < 0 || i >= nblocks || j >= nblocks || i == j) {
      throw std::invalid_argument("build_augmented_system: invalid pair indices");
    }
    if (A_blocks[static_cast<std::size_t>(i)].rows() !=
        A_blocks[static_cast<std::size_t>(j)].rows()) {
      throw std::invalid_argument("build_augmented_system: paired blocks of unequal row count");
    }
    rows += 2 * A_blocks[static_cast<std::size_t>(i)].rows();
  }

  AugmentedSystem out;
  out.A.resize(rows, n);
  out.magnitudes.resize(rows);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < A_blocks.size(); ++i) {
    const auto r = A_blocks[i].rows();
    out.A.middleRows(at, r) = A_blocks[i];
    out.magnitudes.segment(at, r) = b_blocks[i].cwiseAbs();
    at += r;
  }
  const Complex j_unit(0.0, 1.0);
  for (const auto& [i, j] : coherent_pairs) {
    const auto& Ai = A_blocks[static_cast<std::size_t>(i)];
    const auto& Aj = A_blocks[static_cast<std::size_t>(j)];
    const auto& bi = b_blocks[static_cast<std::size_t>(i)];
    const auto& bj = b_blocks[static_cast<std::size_t>(j)];
    const auto r = Ai.rows();
    out.A.middleRows(at, r) = Ai + Aj;
    out.magnitudes.segment(at, r) = (bi + bj).cwiseAbs();
    at += r;
    out.A.middleRows(at, r) = Ai + j_unit * Aj;
    out.magnitudes.segment(at, r) = (bi + j_unit * bj).cwiseAbs();
    at += r;
  }
  return out;
}

AugmentedSystem build_augmented_system(const ComplexMatrix& A, const MagnitudePhaseData& data,
                                       const CoherenceStructure& structure) {
  check_consistency(structure, data);
  if (A.rows() != structure.m) {
    throw std::invalid_argument("build_augmented_system: operator rows do not match structure");
  }
  Eigen::Index extra = 0;
  for (const auto& g : structure.groups) {
    extra += 2 * (static_cast<Eigen::Index>(g.size()) - 1);
  }
  AugmentedSystem out;
  out.A.resize(A.rows() + extra, A.cols());
  out.magnitudes.resize(A.rows() + extra);
  out.A.topRows(A.rows()) = A;
  out.magnitudes.head(A.rows()) = data.magnitudes;
  const Complex j_unit(0.0, 1.0);
  Eigen::Index at = A.rows();
  for (const auto& g : structure.groups) {
    const int a = g.front();
    for (std::size_t t = 1; t < g.size(); ++t) {
      const int k = g[t];
      // b_a + e^{-j dphi_k} b_k = e^{j phi_a} (|b_a| + |b_k|), so the
      // combination magnitudes follow from the phaseless observables alone.
      const Complex rot = std::polar(1.0, -data.phase_diffs[k]);
      out.A.row(at) = A.row(a) + rot * A.row(k);
      out.magnitudes[at] = data.magnitudes[a] + data.magnitudes[k];
      ++at;
      out.A.row(at) = A.row(a) + j_unit * rot * A.row(k);
      out.magnitudes[at] = std::hypot(data.magnitudes[a], data.magnitudes[k]);
      ++at;
    }
  }
  return out;
}

MagnitudePhaseData extract_phase_data(const ComplexVector& b_true,
                                      const CoherenceStructure& structure) {
  if (b_true.size() != structure.m) {
    throw std::invalid_argument("extract_phase_data: vector length does not match structure");
  }
  MagnitudePhaseData data;
  data.magnitudes = b_true.cwiseAbs();
  data.phase_diffs = RealVector::Zero(structure.m);
  for (const auto& g : structure.groups) {
    const int a = g.front();
    if (g.size() > 1 && data.magnitudes[a] == 0.0) {
      throw NumericalError("extract_phase_data: zero-magnitude anchor in group of size " +
                           std::to_string(g.size()) + " leaves phases indeterminate");
    }
    for (std::size_t t = 1; t < g.size(); ++t) {
      const int k = g[t];
      double d = std::arg(b_true[k] * std::conj(b_true[a]));
      if (d == -kPi) {
        d = kPi;
      }
      data.phase_diffs[k] = d;
    }
  }
  return data;
}

}  // namespace phaseret

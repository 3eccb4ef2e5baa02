#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "phaseret/coherence.hpp"
#include "phaseret/random.hpp"

using namespace phaseret;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexVector polar_vector(const std::vector<double>& mags, const std::vector<double>& phases) {
  ComplexVector v(static_cast<Eigen::Index>(mags.size()));
  for (std::size_t i = 0; i < mags.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = std::polar(mags[i], phases[i]);
  }
  return v;
}

}  // namespace

TEST_CASE("coherence structure validates the partition") {
  CHECK_THROWS_AS(CoherenceStructure::from_groups({{0}, {0}}), std::invalid_argument);
  CHECK_THROWS_AS(CoherenceStructure::from_groups({{0}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(CoherenceStructure::from_groups({{0, 2}}), std::invalid_argument);
  const auto s = CoherenceStructure::from_groups({{0}, {1, 3}, {2, 4}});
  CHECK(s.m == 5);
  CHECK(s.group_count() == 3);
  CHECK(s.anchor(1) == 1);
}

TEST_CASE("build_B is the diagonal of measured magnitudes") {
  MagnitudePhaseData data;
  data.magnitudes = RealVector(3);
  data.magnitudes << 1, 2, 3;
  data.phase_diffs = RealVector::Zero(3);
  const ComplexMatrix B = build_B(data);
  CHECK(B.rows() == 3);
  CHECK(std::abs(B(1, 1) - Complex(2, 0)) == 0.0);
  CHECK(B.cwiseAbs().sum() == doctest::Approx(6.0));

  data.magnitudes.setZero();
  CHECK(build_B(data).norm() == 0.0);  // degenerate input is the solver's concern
}

TEST_CASE("build_C reproduces the worked five-measurement example") {
  // two-channel example: groups {0}, {1,3}, {2,4}, stacked order b11,b21,b22,b31,b32
  const auto s = CoherenceStructure::from_groups({{0}, {1, 3}, {2, 4}});
  const std::vector<double> phases = {0.3, 1.1, -0.7, 2.0, -2.5};
  const ComplexVector b = polar_vector({1, 2, 3, 4, 5}, phases);
  const MagnitudePhaseData data = extract_phase_data(b, s);
  const ComplexMatrix C = build_C(s, data);

  CHECK(C.rows() == 5);
  CHECK(C.cols() == 3);
  CHECK(std::abs(C(0, 0) - Complex(1, 0)) == 0.0);
  CHECK(std::abs(C(1, 1) - Complex(1, 0)) == 0.0);
  CHECK(std::abs(C(2, 2) - Complex(1, 0)) == 0.0);
  CHECK(std::abs(C(3, 1) - std::polar(1.0, phases[3] - phases[1])) < 1e-15);
  CHECK(std::abs(C(4, 2) - std::polar(1.0, phases[4] - phases[2])) < 1e-15);
  CHECK(C(3, 0) == Complex(0, 0));
  CHECK(C(1, 2) == Complex(0, 0));
}

TEST_CASE("build_C on singleton groups is the identity") {
  const auto s = CoherenceStructure::singletons(3);
  MagnitudePhaseData data;
  data.magnitudes = RealVector::Ones(3);
  data.phase_diffs = RealVector::Zero(3);
  CHECK((build_C(s, data) - ComplexMatrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("build_C row structure: one unit-magnitude entry per row") {
  auto rng = make_engine(7);
  std::uniform_real_distribution<double> ph(-kPi, kPi);
  const int m = 12;
  std::vector<double> phases(m);
  for (auto& p : phases) {
    p = ph(rng);
  }
  const ComplexVector b = polar_vector(std::vector<double>(m, 1.5), phases);
  std::vector<int> all(m);
  for (int i = 0; i < m; ++i) {
    all[static_cast<std::size_t>(i)] = i;
  }
  const auto s = CoherenceStructure::from_groups({all});
  const ComplexMatrix C = build_C(s, extract_phase_data(b, s));
  CHECK(C.cols() == 1);
  double frob2 = 0.0;
  for (int i = 0; i < m; ++i) {
    int nonzeros = 0;
    for (int g = 0; g < C.cols(); ++g) {
      if (C(i, g) != Complex(0, 0)) {
        ++nonzeros;
        CHECK(std::abs(std::abs(C(i, g)) - 1.0) < 1e-15);
      }
    }
    CHECK(nonzeros == 1);
    frob2 += C.row(i).squaredNorm();
  }
  CHECK(frob2 == doctest::Approx(static_cast<double>(m)));
}

TEST_CASE("B C reconstructs the measurement vector up to group phases") {
  auto rng = make_engine(99);
  std::uniform_real_distribution<double> ph(-kPi, kPi);
  std::uniform_real_distribution<double> mag(0.1, 3.0);
  const auto s = CoherenceStructure::from_groups({{0, 2, 5}, {1}, {3, 4}});
  std::vector<double> mags(6);
  std::vector<double> phases(6);
  for (int i = 0; i < 6; ++i) {
    mags[static_cast<std::size_t>(i)] = mag(rng);
    phases[static_cast<std::size_t>(i)] = ph(rng);
  }
  const ComplexVector b = polar_vector(mags, phases);
  const MagnitudePhaseData data = extract_phase_data(b, s);
  ComplexVector psi(3);
  for (int g = 0; g < 3; ++g) {
    psi[g] = std::polar(1.0, phases[static_cast<std::size_t>(s.anchor(g))]);
  }
  const ComplexVector rebuilt = build_B(data) * (build_C(s, data) * psi);
  CHECK((rebuilt - b).norm() <= 1e-12 * b.norm());
}

TEST_CASE("selectors extract and reassemble the stacked unknowns") {
  const SelectorPair p1 = build_selectors(1, 1);
  CHECK(p1.P1.rows() == 1);
  CHECK(p1.P1.cols() == 2);
  CHECK(p1.P1(0, 0) == Complex(1, 0));
  CHECK(p1.P2(0, 1) == Complex(1, 0));

  const SelectorPair p = build_selectors(2, 3);
  ComplexVector zt(5);
  zt << Complex(1, 2), Complex(3, -1), Complex(0, 1), Complex(-2, 0), Complex(4, 4);
  const ComplexVector z = p.P1 * zt;
  CHECK(z.size() == 2);
  CHECK(z[0] == zt[0]);
  CHECK(z[1] == zt[1]);
  const ComplexVector back = p.P1.transpose() * (p.P1 * zt) + p.P2.transpose() * (p.P2 * zt);
  CHECK((back - zt).norm() == 0.0);
}

TEST_CASE("interferometric phase quadrant handling") {
  const auto zero = interferometric_phase(1, 1, 4, 2);
  CHECK(!zero.indeterminate);
  CHECK(zero.angle == 0.0);

  // a1 = 1, a2 = j: o3 - o1 - o2 = 0 and o4 - o1 - o2 = -2
  const auto quarter = interferometric_phase(1, 1, 2, 0);
  CHECK(quarter.angle == doctest::Approx(-kPi / 2));

  const auto ind = interferometric_phase(0, 4, 4, 4);  // a1 = 0
  CHECK(ind.indeterminate);
  CHECK(ind.angle == 0.0);
}

TEST_CASE("interferometric phase recovers the true angle on random pairs") {
  auto rng = make_engine(123);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const Complex a1(dist(rng), dist(rng));
    const Complex a2(dist(rng), dist(rng));
    if (std::abs(a1) == 0.0 || std::abs(a2) == 0.0) {
      continue;
    }
    const double o1 = std::norm(a1);
    const double o2 = std::norm(a2);
    const double o3 = std::norm(a1 + a2);
    const double o4 = std::norm(a1 + Complex(0, 1) * a2);
    const auto got = interferometric_phase(o1, o2, o3, o4);
    CHECK(!got.indeterminate);
    const double want = std::arg(a1 * std::conj(a2));
    CHECK(std::abs(wrap_angle(got.angle - want)) < 1e-12);
  }
}

TEST_CASE("augmented system with no pairs is the plain incoherent stack") {
  const auto inst_A = ComplexMatrix::Identity(3, 3);
  ComplexVector b(3);
  b << Complex(1, 1), Complex(0, -2), Complex(3, 0);
  const AugmentedSystem aug = build_augmented_system({inst_A}, {b}, {});
  CHECK(aug.A.rows() == 3);
  CHECK((aug.A - inst_A).norm() == 0.0);
  CHECK((aug.magnitudes - b.cwiseAbs()).norm() == 0.0);
}

TEST_CASE("augmented system worked one-row example") {
  ComplexMatrix a2(1, 1);
  a2 << Complex(1, 0);
  ComplexMatrix a3(1, 1);
  a3 << Complex(1, 0);
  ComplexVector b2(1);
  b2 << Complex(1, 0);
  ComplexVector b3(1);
  b3 << Complex(0, 1);
  const AugmentedSystem aug = build_augmented_system({a2, a3}, {b2, b3}, {{0, 1}});
  CHECK(aug.A.rows() == 4);
  CHECK(aug.magnitudes[0] == doctest::Approx(1.0));
  CHECK(aug.magnitudes[1] == doctest::Approx(1.0));
  CHECK(aug.magnitudes[2] == doctest::Approx(std::sqrt(2.0)));
  CHECK(aug.magnitudes[3] == doctest::Approx(0.0));
}

TEST_CASE("augmented system is consistent with a planted solution") {
  auto rng = make_engine(321);
  std::normal_distribution<double> dist(0.0, 1.0);
  auto rand_mat = [&](int r, int c) {
    ComplexMatrix M(r, c);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) {
        M(i, j) = Complex(dist(rng), dist(rng));
      }
    }
    return M;
  };
  const ComplexMatrix A1 = rand_mat(4, 3);
  const ComplexMatrix A2 = rand_mat(2, 3);
  const ComplexMatrix A3 = rand_mat(2, 3);
  ComplexVector z(3);
  z << Complex(dist(rng), dist(rng)), Complex(dist(rng), dist(rng)),
      Complex(dist(rng), dist(rng));
  const AugmentedSystem aug =
      build_augmented_system({A1, A2, A3}, {A1 * z, A2 * z, A3 * z}, {{1, 2}});
  CHECK(aug.A.rows() == 4 + 2 + 2 + 2 * 2);
  const RealVector predicted = (aug.A * z).cwiseAbs();
  CHECK((predicted - aug.magnitudes).norm() <= 1e-12 * aug.magnitudes.norm());
}

TEST_CASE("augmented system rejects paired blocks of unequal row count") {
  const ComplexMatrix A1 = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix A2 = ComplexMatrix::Identity(2, 2).topRows(1);
  CHECK_THROWS_AS(build_augmented_system({A1, A2},
                                         {ComplexVector::Ones(2), ComplexVector::Ones(1)},
                                         {{0, 1}}),
                  std::invalid_argument);
}

TEST_CASE("data-driven augmented system matches the planted field") {
  auto rng = make_engine(77);
  std::normal_distribution<double> dist(0.0, 1.0);
  ComplexMatrix A(6, 2);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 2; ++j) {
      A(i, j) = Complex(dist(rng), dist(rng));
    }
  }
  ComplexVector z(2);
  z << Complex(0.4, -1.0), Complex(1.2, 0.3);
  const ComplexVector b = A * z;
  const auto s = CoherenceStructure::from_groups({{0}, {1, 3}, {2, 4, 5}});
  const MagnitudePhaseData data = extract_phase_data(b, s);
  const AugmentedSystem aug = build_augmented_system(A, data, s);
  CHECK(aug.A.rows() == 6 + 2 * 3);
  CHECK(((aug.A * z).cwiseAbs() - aug.magnitudes).norm() <= 1e-12 * aug.magnitudes.norm());
}

TEST_CASE("extract_phase_data reports anchored phase differences") {
  ComplexVector b(2);
  b << Complex(1, 0), Complex(0, 1);
  const auto one_group = CoherenceStructure::from_groups({{0, 1}});
  const MagnitudePhaseData data = extract_phase_data(b, one_group);
  CHECK(data.magnitudes[0] == doctest::Approx(1.0));
  CHECK(data.magnitudes[1] == doctest::Approx(1.0));
  CHECK(data.phase_diffs[0] == 0.0);
  CHECK(data.phase_diffs[1] == doctest::Approx(kPi / 2));

  const auto singles = CoherenceStructure::singletons(2);
  CHECK(extract_phase_data(b, singles).phase_diffs.norm() == 0.0);
}

TEST_CASE("extract_phase_data wraps differences into (-pi, pi]") {
  const ComplexVector b = polar_vector({1, 1}, {-3.0, 3.0});  // raw diff 6.0
  const auto s = CoherenceStructure::from_groups({{0, 1}});
  const double d = extract_phase_data(b, s).phase_diffs[1];
  CHECK(d == doctest::Approx(6.0 - 2 * kPi));
  CHECK(d > -kPi);
  CHECK(d <= kPi);
}

TEST_CASE("extract_phase_data rejects a zero anchor in a multi-member group") {
  ComplexVector b(2);
  b << Complex(0, 0), Complex(1, 0);
  const auto s = CoherenceStructure::from_groups({{0, 1}});
  CHECK_THROWS_AS(extract_phase_data(b, s), NumericalError);
}

TEST_CASE("wrap_angle maps to the principal interval") {
  CHECK(wrap_angle(3 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(0.25) == doctest::Approx(0.25));
}

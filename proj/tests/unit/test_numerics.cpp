#include <doctest.h>

#include <random>

#include "phaseret/numerics.hpp"
#include "phaseret/random.hpp"

using namespace phaseret;

namespace {

ComplexMatrix random_matrix(int rows, int cols, std::uint64_t seed) {
  auto rng = make_engine(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  ComplexMatrix M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      M(i, j) = Complex(dist(rng), dist(rng));
    }
  }
  return M;
}

ComplexVector random_vector(int size, std::uint64_t seed) {
  auto rng = make_engine(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  ComplexVector v(size);
  for (int i = 0; i < size; ++i) {
    v[i] = Complex(dist(rng), dist(rng));
  }
  return v;
}

}  // namespace

TEST_CASE("matvec identity and zero cases") {
  const ComplexMatrix I = ComplexMatrix::Identity(3, 3);
  ComplexVector x(3);
  x << Complex(1, 0), Complex(0, 1), Complex(-2, 0);
  CHECK((matvec(I, x) - x).norm() == 0.0);

  const ComplexMatrix Z = ComplexMatrix::Zero(2, 2);
  ComplexVector y(2);
  y << Complex(5, 0), Complex(5, 0);
  CHECK(matvec(Z, y).norm() == 0.0);
}

TEST_CASE("matvec matches an entrywise scalar loop") {
  const ComplexMatrix M = random_matrix(4, 3, 11);
  const ComplexVector x = random_vector(3, 12);
  const ComplexVector got = matvec(M, x);
  for (int i = 0; i < 4; ++i) {
    Complex sum(0, 0);
    for (int k = 0; k < 3; ++k) {
      sum += M(i, k) * x[k];
    }
    CHECK(std::abs(got[i] - sum) <= 1e-13 * std::abs(sum));
  }
}

TEST_CASE("matvec rejects dimension mismatch") {
  CHECK_THROWS_AS(matvec(ComplexMatrix::Identity(2, 2), random_vector(3, 1)),
                  std::invalid_argument);
}

TEST_CASE("matvec is linear") {
  const ComplexMatrix M = random_matrix(5, 4, 21);
  const ComplexVector x = random_vector(4, 22);
  const ComplexVector y = random_vector(4, 23);
  const Complex a(0.7, -1.3);
  const Complex b(-0.2, 0.5);
  const ComplexVector lhs = matvec(M, a * x + b * y);
  const ComplexVector rhs = a * matvec(M, x) + b * matvec(M, y);
  CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
}

TEST_CASE("least squares solves square and overdetermined systems") {
  ComplexVector y(2);
  y << Complex(3, 0), Complex(0, 4);
  CHECK((least_squares_solve(ComplexMatrix::Identity(2, 2), y) - y).norm() == 0.0);

  ComplexMatrix ones(2, 1);
  ones << Complex(1, 0), Complex(1, 0);
  ComplexVector rhs(2);
  rhs << Complex(1, 0), Complex(3, 0);
  const ComplexVector x = least_squares_solve(ones, rhs);
  CHECK(std::abs(x[0] - Complex(2, 0)) < 1e-14);
}

TEST_CASE("least squares recovers a planted solution") {
  const ComplexMatrix M = random_matrix(6, 4, 31);
  const ComplexVector x_true = random_vector(4, 32);
  const ComplexVector x = least_squares_solve(M, M * x_true);
  CHECK((x - x_true).norm() < 1e-10 * x_true.norm());
}

TEST_CASE("least squares residual is orthogonal to the column space") {
  for (std::uint64_t seed : {41, 42, 43}) {
    const ComplexMatrix M = random_matrix(8, 5, seed);
    const ComplexVector y = random_vector(8, seed + 100);
    const ComplexVector x = least_squares_solve(M, y);
    const ComplexVector r = M * x - y;
    CHECK((M.adjoint() * r).norm() <= 1e-8 * M.norm() * y.norm());
  }
}

TEST_CASE("least squares returns the minimum-norm solution when rank-deficient") {
  // duplicated column: solutions form a line; minimum norm splits evenly
  ComplexMatrix M(2, 2);
  M << Complex(1, 0), Complex(1, 0), Complex(2, 0), Complex(2, 0);
  ComplexVector y(2);
  y << Complex(2, 0), Complex(4, 0);
  const ComplexVector x = least_squares_solve(M, y);
  CHECK(std::abs(x[0] - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(x[1] - Complex(1, 0)) < 1e-12);
}

TEST_CASE("dominant eigenvector of a spiked diagonal matrix") {
  ComplexMatrix H = ComplexMatrix::Zero(3, 3);
  H(0, 0) = 5.0;
  H(1, 1) = 1.0;
  H(2, 2) = 1.0;
  const ComplexVector v = dominant_eigenvector(H, 40);
  CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
  CHECK(std::abs(v[0]) > 1.0 - 1e-9);
}

TEST_CASE("dominant eigenvector of the identity returns the start vector") {
  const ComplexVector v = dominant_eigenvector(ComplexMatrix::Identity(4, 4), 40);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(v[i] - Complex(0.5, 0.0)) < 1e-15);
  }
}

TEST_CASE("dominant eigenvector of the zero matrix keeps the normalized start") {
  const ComplexVector v = dominant_eigenvector(ComplexMatrix::Zero(2, 2), 10);
  CHECK(std::abs(v[0] - Complex(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
  CHECK(std::abs(v[1] - Complex(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
}

TEST_CASE("dominant eigenvector matches a dense eigensolver on a gapped matrix") {
  // H = U diag(10, 8, ...) U^H with leading gap 2
  const ComplexMatrix G = random_matrix(8, 8, 55);
  const Eigen::HouseholderQR<ComplexMatrix> qr(G);
  const ComplexMatrix U = qr.householderQ();
  Eigen::VectorXd evals(8);
  evals << 10, 8, 7, 5, 3, 2, 1, 0.5;
  const ComplexMatrix H = U * evals.asDiagonal() * U.adjoint();

  const ComplexVector v = dominant_eigenvector(H, 40);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
  const ComplexVector lead = es.eigenvectors().col(7);  // ascending order
  CHECK(std::abs(lead.dot(v)) > 0.999);
  CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
}

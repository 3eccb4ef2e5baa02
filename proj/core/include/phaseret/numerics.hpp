#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

namespace phaseret {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Thrown on data-dependent failures (degenerate anchors, rejected scenarios,
/// non-finite values in numerical paths). API misuse throws std::invalid_argument.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_finite(const ComplexVector& v);
bool is_finite(const ComplexMatrix& m);

/// Dense product M*x with an explicit dimension check.
ComplexVector matvec(const ComplexMatrix& M, const ComplexVector& x);

/// Minimizer of ||M x - y||_2. Square nonsingular systems get the exact
/// solution; rank-deficient ones the minimum-norm least-squares solution.
ComplexVector least_squares_solve(const ComplexMatrix& M, const ComplexVector& y);

/// Power iteration on a Hermitian matrix from the normalized all-ones start
/// vector. Returns a unit-norm vector after exactly `iterations` steps; for a
/// zero matrix the start vector is returned unchanged.
ComplexVector dominant_eigenvector(const ComplexMatrix& H, int iterations);

/// Same, with a caller-supplied start vector (need not be normalized).
ComplexVector dominant_eigenvector(const ComplexMatrix& H, int iterations,
                                   const ComplexVector& start);

}  // namespace phaseret

#include "phaseret/numerics.hpp"

namespace phaseret {

bool is_finite(const ComplexVector& v) {
  return v.allFinite();
}

bool is_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

ComplexVector matvec(const ComplexMatrix& M, const ComplexVector& x) {
  if (M.cols() != x.size()) {
    throw std::invalid_argument("matvec: dimension mismatch (" +
                                std::to_string(M.cols()) + " cols vs " +
                                std::to_string(x.size()) + " entries)");
  }
  return M * x;
}

ComplexVector least_squares_solve(const ComplexMatrix& M, const ComplexVector& y) {
  if (M.rows() < 1) {
    throw std::invalid_argument("least_squares_solve: empty system");
  }
  if (M.rows() != y.size()) {
    throw std::invalid_argument("least_squares_solve: rhs length " +
                                std::to_string(y.size()) + " does not match " +
                                std::to_string(M.rows()) + " rows");
  }
  // Complete orthogonal decomposition yields the minimum-norm solution for
  // rank-deficient systems; plain QR would not.
  return M.completeOrthogonalDecomposition().solve(y);
}

ComplexVector dominant_eigenvector(const ComplexMatrix& H, int iterations,
                                   const ComplexVector& start) {
  if (H.rows() != H.cols()) {
    throw std::invalid_argument("dominant_eigenvector: matrix must be square");
  }
  if (iterations < 1) {
    throw std::invalid_argument("dominant_eigenvector: iterations must be >= 1");
  }
  if (start.size() != H.rows()) {
    throw std::invalid_argument("dominant_eigenvector: start vector length mismatch");
  }
  double norm = start.norm();
  if (norm == 0.0) {
    throw std::invalid_argument("dominant_eigenvector: zero start vector");
  }
  ComplexVector v = start / norm;
  for (int it = 0; it < iterations; ++it) {
    ComplexVector w = H * v;
    double wn = w.norm();
    if (wn == 0.0) {
      break;  // zero matrix (or v in the null space): keep the current vector
    }
    v = w / wn;
  }
  return v;
}

ComplexVector dominant_eigenvector(const ComplexMatrix& H, int iterations) {
  ComplexVector ones = ComplexVector::Ones(H.rows());
  return dominant_eigenvector(H, iterations, ones);
}

}  // namespace phaseret

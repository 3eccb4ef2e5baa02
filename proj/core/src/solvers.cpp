#include "phaseret/solvers.hpp"

#include <cmath>

namespace phaseret {

int choose_anchor(const CoherenceStructure& structure, const MagnitudePhaseData& data) {
  if (data.magnitudes.size() != structure.m) {
    throw std::invalid_argument("choose_anchor: data does not match structure");
  }
  int best = -1;
  double best_mag = 0.0;
  for (int g = 0; g < structure.group_count(); ++g) {
    const double mag = data.magnitudes[structure.anchor(g)];
    if (mag > best_mag) {
      best_mag = mag;
      best = g;
    }
  }
  if (best < 0) {
    throw NumericalError("choose_anchor: all anchor magnitudes are zero");
  }
  return best;
}

SolveReport solve_linear_pc(const ComplexMatrix& A, const MagnitudePhaseData& data,
                            const CoherenceStructure& structure, int s) {
  const auto m = A.rows();
  const auto n = A.cols();
  if (m != structure.m) {
    throw std::invalid_argument("solve_linear_pc: operator rows do not match structure");
  }
  const int q = structure.group_count();
  if (s < 0 || s >= q) {
    throw std::invalid_argument("solve_linear_pc: anchor group out of range");
  }

  const ComplexMatrix BC = build_B(data) * build_C(structure, data);
  if (BC.col(s).norm() == 0.0) {
    throw NumericalError("solve_linear_pc: anchor group " + std::to_string(s) +
                         " has all-zero magnitudes");
  }

  // [A, -BC] z-tilde = 0 subject to psi_s = 1: move column n+s to the
  // right-hand side and solve for the remaining n+q-1 unknowns.
  const auto unknowns = n + q - 1;
  ComplexMatrix M(m, unknowns);
  M.leftCols(n) = A;
  Eigen::Index at = n;
  for (int g = 0; g < q; ++g) {
    if (g == s) {
      continue;
    }
    M.col(at++) = -BC.col(g);
  }
  const ComplexVector rhs = BC.col(s);

  SolveReport rep;
  rep.anchor_index = s;
  rep.condition_warning = m < unknowns;

  Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(M);
  if (cod.rank() < std::min<Eigen::Index>(m, unknowns)) {
    rep.condition_warning = true;
  }
  const ComplexVector x = cod.solve(rhs);

  rep.solution.z = x.head(n);
  rep.solution.psi = ComplexVector(q);
  at = n;
  for (int g = 0; g < q; ++g) {
    rep.solution.psi[g] = (g == s) ? Complex(1.0, 0.0) : x[at++];
  }
  rep.final_objective = (M * x - rhs).norm();
  rep.iterations_used = 0;  // direct solve
  return rep;
}

ComplexVector spectral_initialize(const ComplexMatrix& A, const RealVector& magnitudes,
                                  int iterations) {
  const auto m = A.rows();
  const auto n = A.cols();
  if (magnitudes.size() != m) {
    throw std::invalid_argument("spectral_initialize: magnitude count does not match rows");
  }
  const double power = magnitudes.squaredNorm();
  if (power == 0.0) {
    return ComplexVector::Zero(n);  // no signal: caller warned via zero vector
  }
  const RealVector weights = magnitudes.cwiseAbs2() / static_cast<double>(m);
  const ComplexMatrix Y = A.adjoint() * weights.asDiagonal() * A;
  const ComplexVector v = dominant_eigenvector(Y, iterations);
  const double scale = std::sqrt(power / A.squaredNorm());
  return scale * v;
}

namespace {

// f and the Wirtinger gradient share the forward product; the solver path
// computes both per evaluation.
double objective_and_gradient(const ComplexMatrix& A, const RealVector& beta,
                              const ComplexVector& z, ComplexVector& grad) {
  const auto m = A.rows();
  const ComplexVector w = A * z;
  const RealVector r = w.cwiseAbs2() - beta;
  grad = A.adjoint() * (r.cast<Complex>().asDiagonal() * w) / static_cast<double>(m);
  return r.squaredNorm() / (2.0 * static_cast<double>(m));
}

}  // namespace

double nonconvex_objective(const ComplexMatrix& A, const RealVector& magnitudes,
                           const ComplexVector& z) {
  if (z.size() != A.cols() || magnitudes.size() != A.rows()) {
    throw std::invalid_argument("nonconvex_objective: dimension mismatch");
  }
  const RealVector r = (A * z).cwiseAbs2() - magnitudes.cwiseAbs2();
  return r.squaredNorm() / (2.0 * static_cast<double>(A.rows()));
}

ComplexVector nonconvex_gradient(const ComplexMatrix& A, const RealVector& magnitudes,
                                 const ComplexVector& z) {
  if (z.size() != A.cols() || magnitudes.size() != A.rows()) {
    throw std::invalid_argument("nonconvex_gradient: dimension mismatch");
  }
  ComplexVector grad(A.cols());
  objective_and_gradient(A, magnitudes.cwiseAbs2(), z, grad);
  return grad;
}

SolveReport solve_nonconvex(const ComplexMatrix& A, const RealVector& magnitudes,
                            const ComplexVector& z0, const NonconvexSettings& settings) {
  const auto n = A.cols();
  if (z0.size() != n) {
    throw std::invalid_argument("solve_nonconvex: start vector length does not match columns");
  }
  if (magnitudes.size() != A.rows()) {
    throw std::invalid_argument("solve_nonconvex: magnitude count does not match rows");
  }
  if (!is_finite(z0)) {
    throw NumericalError("solve_nonconvex: non-finite start vector");
  }
  const RealVector beta = magnitudes.cwiseAbs2();

  ComplexVector z_buf(n);
  ComplexVector g_buf(n);
  const LbfgsObjective fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    z_buf.real() = x.head(n);
    z_buf.imag() = x.tail(n);
    const double f = objective_and_gradient(A, beta, z_buf, g_buf);
    // d/d(Re z) = 2 Re(dF/dzbar), d/d(Im z) = 2 Im(dF/dzbar)
    grad.head(n) = 2.0 * g_buf.real();
    grad.tail(n) = 2.0 * g_buf.imag();
    return f;
  };

  Eigen::VectorXd x0(2 * n);
  x0.head(n) = z0.real();
  x0.tail(n) = z0.imag();

  LbfgsOptions opts;
  opts.max_iterations = settings.max_iterations;
  opts.memory = settings.memory;
  opts.gradient_tolerance = settings.gradient_tolerance;
  opts.line_search = settings.line_search;
  const LbfgsResult lb = lbfgs_minimize(fn, std::move(x0), opts);

  SolveReport rep;
  rep.solution.z = ComplexVector(n);
  rep.solution.z.real() = lb.x.head(n);
  rep.solution.z.imag() = lb.x.tail(n);
  rep.iterations_used = lb.iterations;
  rep.final_objective = lb.fx;
  rep.converged = lb.converged;
  return rep;
}

std::optional<ComplexVector> coherent_resolve(const ComplexMatrix& A,
                                              const MagnitudePhaseData& data,
                                              const CoherenceStructure& structure,
                                              const ComplexVector& psi) {
  if (psi.size() != structure.group_count()) {
    throw std::invalid_argument("coherent_resolve: psi length does not match group count");
  }
  ComplexVector unit_psi(psi.size());
  for (Eigen::Index g = 0; g < psi.size(); ++g) {
    const double mag = std::abs(psi[g]);
    if (mag == 0.0) {
      return std::nullopt;  // phase of this group is undetermined; skip refinement
    }
    unit_psi[g] = psi[g] / mag;
  }
  const ComplexVector b_hat = build_B(data) * (build_C(structure, data) * unit_psi);
  return least_squares_solve(A, b_hat);
}

}  // namespace phaseret

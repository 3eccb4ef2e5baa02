#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace phaseret {

struct LineSearchParams {
  double sufficient_decrease = 1e-4;  // Armijo c1
  double curvature = 0.9;             // Wolfe c2
  int max_evaluations = 60;
};

struct LbfgsOptions {
  int max_iterations = 2000;
  int memory = 10;
  double gradient_tolerance = 1e-12;  // relative to the initial gradient norm
  LineSearchParams line_search;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double fx = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // f at x0 and each accepted iterate
};

/// Objective callback: writes the gradient and returns f(x).
using LbfgsObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Limited-memory BFGS with a strong-Wolfe line search. Deterministic; the
/// line search never accepts a point with a higher objective, and the best
/// iterate seen is returned if the search stalls before the iteration cap.
LbfgsResult lbfgs_minimize(const LbfgsObjective& fn, Eigen::VectorXd x0,
                           const LbfgsOptions& options = {});

}  // namespace phaseret

#include "phaseret/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "phaseret/numerics.hpp"

namespace phaseret {

namespace {

struct ProbePoint {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative along d
};

class LineSearch {
 public:
  LineSearch(const LbfgsObjective& fn, const Eigen::VectorXd& x, const Eigen::VectorXd& d,
             double f0, double slope0, const LineSearchParams& params)
      : fn_(fn), x_(x), d_(d), f0_(f0), slope0_(slope0), params_(params),
        xt_(x.size()), gt_(x.size()) {}

  /// Strong-Wolfe search. On success returns true; xt()/gt()/ft() hold the
  /// accepted point. Never accepts f above f0.
  bool run(double alpha_init) {
    ProbePoint prev{0.0, f0_, slope0_};
    double alpha = alpha_init;
    const double alpha_max = 1e20;
    for (; evals_ < params_.max_evaluations;) {
      ProbePoint cur = probe(alpha);
      if (!std::isfinite(cur.f) || cur.f > f0_ + params_.sufficient_decrease * alpha * slope0_ ||
          (evals_ > 1 && cur.f >= prev.f)) {
        return zoom(prev, cur);
      }
      if (std::abs(cur.slope) <= -params_.curvature * slope0_) {
        accept(cur);
        return true;
      }
      if (cur.slope >= 0.0) {
        return zoom(cur, prev);
      }
      prev = cur;
      alpha = std::min(2.0 * alpha, alpha_max);
    }
    return accept_if_decrease(prev);
  }

  const Eigen::VectorXd& xt() const { return xt_; }
  const Eigen::VectorXd& gt() const { return gt_; }
  double ft() const { return ft_; }
  double alpha() const { return accepted_alpha_; }

 private:
  ProbePoint probe(double alpha) {
    xt_ = x_ + alpha * d_;
    const double f = fn_(xt_, gt_);
    ++evals_;
    last_alpha_ = alpha;
    last_f_ = f;
    return {alpha, f, gt_.dot(d_)};
  }

  void accept(const ProbePoint& p) {
    if (p.alpha != last_alpha_) {
      probe(p.alpha);
    }
    ft_ = p.f;
    accepted_alpha_ = p.alpha;
  }

  bool accept_if_decrease(const ProbePoint& p) {
    if (p.alpha > 0.0 && std::isfinite(p.f) && p.f < f0_) {
      accept(p);
      return true;
    }
    return false;
  }

  // Nocedal-style zoom between a point satisfying the decrease condition (lo)
  // and one bracketing the Wolfe point (hi). Quadratic interpolation with a
  // safeguarded bisection fallback.
  bool zoom(ProbePoint lo, ProbePoint hi) {
    while (evals_ < params_.max_evaluations) {
      const double span = hi.alpha - lo.alpha;
      if (std::abs(span) < 1e-18 * std::max(1.0, std::abs(lo.alpha))) {
        break;
      }
      double alpha = interpolate(lo, hi);
      ProbePoint cur = probe(alpha);
      if (!std::isfinite(cur.f) || cur.f > f0_ + params_.sufficient_decrease * alpha * slope0_ ||
          cur.f >= lo.f) {
        hi = cur;
        continue;
      }
      if (std::abs(cur.slope) <= -params_.curvature * slope0_) {
        accept(cur);
        return true;
      }
      if (cur.slope * span >= 0.0) {
        hi = lo;
      }
      lo = cur;
    }
    return accept_if_decrease(lo);
  }

  double interpolate(const ProbePoint& lo, const ProbePoint& hi) const {
    const double span = hi.alpha - lo.alpha;
    double alpha = lo.alpha + 0.5 * span;  // bisection fallback
    if (std::isfinite(hi.f)) {
      const double denom = 2.0 * (hi.f - lo.f - lo.slope * span);
      if (denom != 0.0) {
        const double quad = lo.alpha - lo.slope * span * span / denom;
        const double lo_guard = lo.alpha + 0.1 * span;
        const double hi_guard = lo.alpha + 0.9 * span;
        const double a = std::min(lo_guard, hi_guard);
        const double b = std::max(lo_guard, hi_guard);
        if (quad > a && quad < b) {
          alpha = quad;
        }
      }
    }
    return alpha;
  }

  const LbfgsObjective& fn_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& d_;
  double f0_;
  double slope0_;
  LineSearchParams params_;
  Eigen::VectorXd xt_;
  Eigen::VectorXd gt_;
  double ft_ = 0.0;
  double accepted_alpha_ = 0.0;
  double last_alpha_ = -1.0;
  double last_f_ = 0.0;
  int evals_ = 0;
};

}  // namespace

LbfgsResult lbfgs_minimize(const LbfgsObjective& fn, Eigen::VectorXd x0,
                           const LbfgsOptions& options) {
  if (options.max_iterations < 1 || options.memory < 1 || options.gradient_tolerance <= 0.0) {
    throw std::invalid_argument("lbfgs_minimize: invalid options");
  }
  const auto dim = x0.size();
  Eigen::VectorXd g(dim);
  double f = fn(x0, g);
  if (!std::isfinite(f)) {
    throw NumericalError("lbfgs_minimize: objective is not finite at the start point");
  }
  LbfgsResult res;
  res.x = std::move(x0);
  res.fx = f;
  res.objective_trace.push_back(f);

  const double g0_norm = g.norm();
  res.gradient_norm = g0_norm;
  if (g0_norm == 0.0) {
    res.converged = true;
    return res;
  }
  const double gtol = options.gradient_tolerance * g0_norm;

  std::deque<Eigen::VectorXd> s_hist;
  std::deque<Eigen::VectorXd> y_hist;
  std::deque<double> rho_hist;
  double gamma = 1.0;

  Eigen::VectorXd best_x = res.x;
  double best_f = f;

  Eigen::VectorXd d(dim);
  Eigen::VectorXd q(dim);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // two-loop recursion
    q = g;
    const auto hist = static_cast<int>(s_hist.size());
    std::vector<double> alpha_coef(static_cast<std::size_t>(hist));
    for (int i = hist - 1; i >= 0; --i) {
      const double a = rho_hist[static_cast<std::size_t>(i)] *
                       s_hist[static_cast<std::size_t>(i)].dot(q);
      alpha_coef[static_cast<std::size_t>(i)] = a;
      q -= a * y_hist[static_cast<std::size_t>(i)];
    }
    q *= gamma;
    for (int i = 0; i < hist; ++i) {
      const double b = rho_hist[static_cast<std::size_t>(i)] *
                       y_hist[static_cast<std::size_t>(i)].dot(q);
      q += (alpha_coef[static_cast<std::size_t>(i)] - b) * s_hist[static_cast<std::size_t>(i)];
    }
    d = -q;

    double slope = d.dot(g);
    if (!(slope < 0.0)) {
      // history produced a non-descent direction; fall back to steepest descent
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      gamma = 1.0;
      d = -g;
      slope = -g.squaredNorm();
    }

    const double alpha_init = (iter == 0) ? std::min(1.0, 1.0 / g.norm()) : 1.0;
    LineSearch search(fn, res.x, d, f, slope, options.line_search);
    if (!search.run(alpha_init)) {
      break;  // no acceptable step; best iterate is returned
    }

    Eigen::VectorXd s = search.xt() - res.x;
    Eigen::VectorXd y = search.gt() - g;
    res.x = search.xt();
    g = search.gt();
    f = search.ft();
    res.iterations = iter + 1;
    res.objective_trace.push_back(f);
    if (f < best_f) {
      best_f = f;
      best_x = res.x;
    }

    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      if (static_cast<int>(s_hist.size()) == options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      gamma = sy / y.squaredNorm();
      rho_hist.push_back(1.0 / sy);
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
    }

    res.gradient_norm = g.norm();
    if (res.gradient_norm <= gtol) {
      res.converged = true;
      break;
    }
  }

  if (best_f < f) {
    res.x = std::move(best_x);
    res.fx = best_f;
  } else {
    res.fx = f;
  }
  return res;
}

}  // namespace phaseret

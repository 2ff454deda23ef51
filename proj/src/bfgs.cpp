// SPDX-License-Identifier: Apache-2.0
#include "vqnegf/bfgs.hpp"

#include <cmath>
#include <limits>

namespace vqnegf {

namespace {

struct Evaluation {
  double alpha = 0.0;
  double phi = 0.0;
  double dphi = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd g;
  bool finite = false;
};

class Tracker {
 public:
  Tracker(const BfgsObjective& objective, Eigen::Index dim)
      : objective_(objective),
        best_x_(dim),
        best_f_(std::numeric_limits<double>::infinity()) {}

  double evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    ++count_;
    const double f = objective_(x, g);
    if (std::isfinite(f) && f < best_f_) {
      best_f_ = f;
      best_x_ = x;
    }
    return f;
  }

  int count() const { return count_; }
  const Eigen::VectorXd& best_x() const { return best_x_; }
  double best_f() const { return best_f_; }

 private:
  const BfgsObjective& objective_;
  Eigen::VectorXd best_x_;
  double best_f_;
  int count_ = 0;
};

struct LineSearchResult {
  bool ok = false;          // both Wolfe conditions hold at point
  Evaluation point;
  Evaluation best;          // lowest finite cost among all probes
  bool has_best = false;
};

// Strong-Wolfe bracket-and-zoom search along p from x0. On functions with
// near-discontinuous gradients (the clamped-log hybrid cost) the Wolfe
// conditions can be unattainable; the best probed point is returned so the
// caller can still make progress.
class LineSearch {
 public:
  LineSearch(Tracker& tracker, const Eigen::VectorXd& x0,
             const Eigen::VectorXd& p, double phi0, double dphi0, double c1,
             double c2)
      : tracker_(tracker), x0_(x0), p_(p), phi0_(phi0), dphi0_(dphi0),
        c1_(c1), c2_(c2) {}

  LineSearchResult run(double first_step) {
    Evaluation prev;
    prev.alpha = 0.0;
    prev.phi = phi0_;
    prev.dphi = dphi0_;
    prev.finite = true;
    prev.x = x0_;

    double alpha = first_step;
    for (int iter = 0; iter < 20; ++iter) {
      Evaluation e = probe(alpha);
      if (!e.finite || e.phi > phi0_ + c1_ * alpha * dphi0_ ||
          (iter > 0 && e.phi >= prev.phi)) {
        return zoom(std::move(prev), std::move(e));
      }
      if (std::abs(e.dphi) <= -c2_ * dphi0_) return finish(std::move(e));
      if (e.dphi >= 0.0) return zoom(std::move(e), std::move(prev));
      prev = std::move(e);
      alpha *= 2.0;
      if (alpha > 1e8) break;
    }
    return fail();
  }

 private:
  Evaluation probe(double alpha) {
    Evaluation e;
    e.alpha = alpha;
    e.x = x0_ + alpha * p_;
    e.g.resize(x0_.size());
    e.phi = tracker_.evaluate(e.x, e.g);
    e.finite = std::isfinite(e.phi);
    e.dphi = e.finite ? e.g.dot(p_) : 0.0;
    if (e.finite && (!has_best_ || e.phi < best_.phi)) {
      best_ = e;
      has_best_ = true;
    }
    return e;
  }

  LineSearchResult finish(Evaluation e) {
    LineSearchResult r;
    r.ok = true;
    r.point = std::move(e);
    r.best = best_;
    r.has_best = has_best_;
    return r;
  }

  LineSearchResult fail() {
    LineSearchResult r;
    r.best = best_;
    r.has_best = has_best_;
    return r;
  }

  LineSearchResult zoom(Evaluation lo, Evaluation hi) {
    for (int iter = 0; iter < 40; ++iter) {
      double alpha = 0.5 * (lo.alpha + hi.alpha);
      // Quadratic interpolation through (lo.phi, lo.dphi, hi.phi), with a
      // bisection safeguard keeping the trial inside the bracket.
      if (hi.finite) {
        const double d = hi.alpha - lo.alpha;
        const double denom = hi.phi - lo.phi - lo.dphi * d;
        if (std::abs(denom) > 1e-30) {
          const double trial = lo.alpha - 0.5 * lo.dphi * d * d / denom;
          const double lower = std::min(lo.alpha, hi.alpha);
          const double upper = std::max(lo.alpha, hi.alpha);
          const double margin = 0.1 * (upper - lower);
          if (trial > lower + margin && trial < upper - margin) alpha = trial;
        }
      }
      Evaluation e = probe(alpha);
      if (!e.finite || e.phi > phi0_ + c1_ * alpha * dphi0_ ||
          e.phi >= lo.phi) {
        hi = std::move(e);
      } else {
        if (std::abs(e.dphi) <= -c2_ * dphi0_) return finish(std::move(e));
        if (e.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(e);
      }
      if (std::abs(hi.alpha - lo.alpha) <
          1e-12 * std::max(1.0, std::abs(lo.alpha))) {
        break;
      }
    }
    // Armijo held at lo but curvature never did; accept lo only when no
    // probed point beats it, otherwise report failure and let the caller
    // take the best probe.
    if (lo.alpha > 0.0 && lo.finite &&
        lo.phi <= phi0_ + c1_ * lo.alpha * dphi0_ &&
        !(has_best_ && best_.phi < lo.phi)) {
      return finish(std::move(lo));
    }
    return fail();
  }

  Tracker& tracker_;
  const Eigen::VectorXd& x0_;
  const Eigen::VectorXd& p_;
  double phi0_;
  double dphi0_;
  double c1_;
  double c2_;
  Evaluation best_;
  bool has_best_ = false;
};

}  // namespace

BfgsResult minimize_bfgs(const BfgsObjective& objective, Eigen::VectorXd x0,
                         const BfgsOptions& options) {
  const Eigen::Index dim = x0.size();
  Tracker tracker(objective, dim);

  BfgsResult result;
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(dim);
  double f = tracker.evaluate(x, g);
  result.history.push_back(f);

  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(dim, dim);
  bool first_update = true;
  bool stall_armed = false;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd p = -(h * g);
    double dphi0 = p.dot(g);
    if (!(dphi0 < 0.0)) {
      h.setIdentity();
      first_update = true;
      p = -g;
      dphi0 = p.dot(g);
    }

    LineSearchResult ls =
        LineSearch(tracker, x, p, f, dphi0, options.wolfe_c1, options.wolfe_c2)
            .run(1.0);
    if (!ls.ok) {
      // Retry once along steepest descent from a reset Hessian.
      h.setIdentity();
      first_update = true;
      p = -g;
      dphi0 = p.dot(g);
      const double scale = 1.0 / std::max(1.0, g.norm());
      ls = LineSearch(tracker, x, p, f, dphi0, options.wolfe_c1,
                      options.wolfe_c2)
               .run(scale);
    }

    bool wolfe_step = ls.ok;
    Evaluation step;
    const double wolfe_gain = ls.ok ? f - ls.point.phi : 0.0;
    const double best_gain = ls.has_best ? f - ls.best.phi : 0.0;
    if (ls.has_best && best_gain > 0.0 &&
        best_gain > 10.0 * std::max(wolfe_gain, 0.0)) {
      // The search probed a point far better than the one it formally
      // settled on (gradient-cliff landscapes); keep the better point. The
      // curvature update below still applies: steps across a gradient wall
      // carry exactly the stiffness information that steers later steps
      // parallel to the wall.
      step = std::move(ls.best);
      wolfe_step = false;
    } else if (ls.ok) {
      step = std::move(ls.point);
    } else {
      break;  // no decrease found anywhere: stop, converged stays false
    }

    const Eigen::VectorXd s = step.x - x;
    const Eigen::VectorXd y = step.g - g;
    const double f_prev = f;
    const double g_norm_prev = g.norm();
    x = std::move(step.x);
    f = step.phi;
    g = std::move(step.g);
    ++result.iterations;
    result.history.push_back(f);

    const double g_norm = g.norm();
    const bool cliff_jump = g_norm > 1e3 * g_norm_prev ||
                            (g_norm_prev > 0.0 && g_norm < 1e-3 * g_norm_prev);
    if (wolfe_step && cliff_jump) {
      h.setIdentity();
      first_update = true;
    } else if (wolfe_step) {
      const double sy = s.dot(y);
      if (sy > 1e-12 * s.norm() * y.norm()) {
        if (first_update) {
          h = (sy / y.squaredNorm()) * Eigen::MatrixXd::Identity(dim, dim);
          first_update = false;
        }
        const double rho = 1.0 / sy;
        const Eigen::VectorXd hy = h * y;
        const double yhy = y.dot(hy);
        h.noalias() -= rho * (s * hy.transpose() + hy * s.transpose());
        h.noalias() += (rho * rho * yhy + rho) * (s * s.transpose());
      }
    }
    if (wolfe_step &&
        std::abs(f_prev - f) < options.cost_change_tolerance) {
      // Confirm the stall from a reset Hessian before terminating: a tiny
      // accepted step under a distorted Hessian does not prove convergence.
      if (stall_armed) {
        result.converged = true;
        break;
      }
      stall_armed = true;
      h.setIdentity();
      first_update = true;
    } else {
      stall_armed = false;
    }
  }

  result.evaluations = tracker.count();
  if (tracker.best_f() <= f) {
    result.x = tracker.best_x();
    result.f = tracker.best_f();
  } else {
    result.x = std::move(x);
    result.f = f;
  }
  return result;
}

}  // namespace vqnegf

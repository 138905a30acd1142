#include "blockprec/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "blockprec/errors.hpp"
#include "blockprec/pdcore.hpp"

namespace blockprec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ScaleRule {
  double diag = 1.0;
  double off = 1.0;
};

// n == 0: radii verbatim. n > 0: prior-scale rates under an N/2 likelihood;
// each off-diagonal is counted once by the prior but twice by the solver's
// double-sum convention, hence the factor split.
ScaleRule scale_rule(int n) {
  if (n < 0) {
    throw InvalidInputError("penalty scaling: negative sample count");
  }
  if (n == 0) {
    return {1.0, 1.0};
  }
  return {2.0 / n, 1.0 / n};
}

}  // namespace

DualRadii l1_radii(const SymMatrix& penalties, int n) {
  const ScaleRule sc = scale_rule(n);
  const int d = penalties.dim();
  DualRadii out;
  out.box = Eigen::MatrixXd::Zero(d, d);
  out.ball_id = Eigen::MatrixXi::Constant(d, d, -1);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const double r = penalties(i, j) * (i == j ? sc.diag : sc.off);
      if (!(r >= 0.0) || !std::isfinite(r)) {
        throw InvalidInputError("l1_radii: penalties must be finite and nonnegative");
      }
      out.box(i, j) = r;
      out.box(j, i) = r;
    }
  }
  return out;
}

DualRadii gl1_radii(const Partition& p, const PenaltyConfig& c, int n) {
  return l1_radii(entry_penalties(p, c), n);
}

DualRadii gl12_radii(const Partition& p, const PenaltyConfig& c, int n) {
  c.validate();
  const ScaleRule sc = scale_rule(n);
  const int d = p.dim();
  DualRadii out;
  out.box = Eigen::MatrixXd::Zero(d, d);
  out.ball_id = Eigen::MatrixXi::Constant(d, d, -1);
  for (int i = 0; i < d; ++i) {
    out.box(i, i) = c.lambda_d * sc.diag;
    for (int j = i + 1; j < d; ++j) {
      if (p.same_group(i, j)) {
        out.box(i, j) = c.lambda_1 * sc.off;
        out.box(j, i) = out.box(i, j);
      }
    }
  }
  const int k = p.groups();
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      BlockBall ball;
      ball.k = a;
      ball.l = b;
      ball.radius = static_cast<double>(p.cross_pairs(a, b)) * c.lambda_0 * sc.off;
      for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
          const int gi = p.group(i);
          const int gj = p.group(j);
          if ((gi == a && gj == b) || (gi == b && gj == a)) {
            ball.entries.emplace_back(i, j);
          }
        }
      }
      const int id = static_cast<int>(out.balls.size());
      for (auto [i, j] : ball.entries) {
        out.ball_id(i, j) = id;
        out.ball_id(j, i) = id;
      }
      out.balls.push_back(std::move(ball));
    }
  }
  return out;
}

DualRadii radii_for(PriorKind kind, const Partition& p, const PenaltyConfig& c, int n) {
  return kind == PriorKind::gl1 ? gl1_radii(p, c, n) : gl12_radii(p, c, n);
}

namespace {

void project_feasible(Eigen::MatrixXd& w, const Eigen::MatrixXd& s, const DualRadii& radii) {
  const int d = radii.dim();
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      if (radii.ball_id(i, j) >= 0) {
        continue;
      }
      const double r = radii.box(i, j);
      const double v = std::clamp(w(i, j), s(i, j) - r, s(i, j) + r);
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  for (const BlockBall& ball : radii.balls) {
    double sq = 0.0;
    for (auto [i, j] : ball.entries) {
      const double v = w(i, j) - s(i, j);
      sq += v * v;
    }
    const double norm = std::sqrt(sq);
    if (norm > ball.radius) {
      const double scale = (ball.radius > 0.0) ? ball.radius / norm : 0.0;
      for (auto [i, j] : ball.entries) {
        const double v = s(i, j) + (w(i, j) - s(i, j)) * scale;
        w(i, j) = v;
        w(j, i) = v;
      }
    }
  }
}

// penalty R(omega) matching the radii: diagonal once, off-diagonal entries in
// both triangles, balls over representative entries
double penalty_value(const Eigen::MatrixXd& omega, const DualRadii& radii) {
  const int d = radii.dim();
  double out = 0.0;
  for (int i = 0; i < d; ++i) {
    out += radii.box(i, i) * std::abs(omega(i, i));
    for (int j = i + 1; j < d; ++j) {
      if (radii.ball_id(i, j) < 0) {
        out += 2.0 * radii.box(i, j) * std::abs(omega(i, j));
      }
    }
  }
  for (const BlockBall& ball : radii.balls) {
    double sq = 0.0;
    for (auto [i, j] : ball.entries) {
      sq += omega(i, j) * omega(i, j);
    }
    out += 2.0 * ball.radius * std::sqrt(sq);
  }
  return out;
}

double logdet_llt(const Eigen::LLT<Eigen::MatrixXd>& llt, int d) {
  double out = 0.0;
  for (int i = 0; i < d; ++i) {
    out += std::log(llt.matrixLLT()(i, i));
  }
  return 2.0 * out;
}

}  // namespace

SymMatrix tikhonov(const SymMatrix& s, double lam) {
  if (!std::isfinite(lam) || lam < 0.0) {
    throw InvalidInputError("tikhonov: lambda must be finite and nonnegative");
  }
  const int d = s.dim();
  Eigen::MatrixXd shifted = s.dense() + lam * Eigen::MatrixXd::Identity(d, d);
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) {
    throw DomainError("tikhonov: S + lambda I is not positive-definite");
  }
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  return SymMatrix::mirror_upper(inv);
}

double primal_objective(const SymMatrix& omega, const SymMatrix& s, const DualRadii& radii) {
  const LogDetResult ld = cholesky_logdet(omega);
  if (!ld.success) {
    return -kInf;
  }
  const double trace = omega.dense().cwiseProduct(s.dense()).sum();
  return ld.logdet - trace - penalty_value(omega.dense(), radii);
}

double duality_gap(const SymMatrix& w, const SymMatrix& s, const DualRadii& radii) {
  const int d = w.dim();
  Eigen::LLT<Eigen::MatrixXd> llt(w.dense());
  if (llt.info() != Eigen::Success) {
    throw DomainError("duality_gap: W is not positive-definite");
  }
  Eigen::MatrixXd omega = llt.solve(Eigen::MatrixXd::Identity(d, d));
  const double trace = omega.cwiseProduct(s.dense()).sum();
  return trace + penalty_value(omega, radii) - d;
}

FitResult fit_penalized(const SymMatrix& s, const DualRadii& radii, const SolverOptions& opts) {
  const int d = s.dim();
  if (radii.dim() != d) {
    throw InvalidInputError("fit_penalized: radii dimension mismatch");
  }
  if (!s.all_finite()) {
    throw InvalidInputError("fit_penalized: non-finite scatter matrix");
  }

  const Eigen::MatrixXd& sd = s.dense();
  Eigen::MatrixXd w = sd;
  for (int i = 0; i < d; ++i) {
    w(i, i) += radii.box(i, i);
  }
  project_feasible(w, sd, radii);

  Eigen::LLT<Eigen::MatrixXd> llt(w);
  if (llt.info() != Eigen::Success) {
    throw DomainError("fit_penalized: initial point not PD (need positive diagonal penalties or PD S)");
  }

  FitResult res;
  double f = logdet_llt(llt, d);
  Eigen::MatrixXd grad = llt.solve(Eigen::MatrixXd::Identity(d, d));
  grad = 0.5 * (grad + grad.transpose()).eval();

  Eigen::MatrixXd w_prev;
  Eigen::MatrixXd grad_prev;
  double step = 1.0 / std::max(grad.cwiseAbs().maxCoeff(), 1e-12);
  int stall = 0;

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    if (opts.track_objective) {
      res.trace.push_back(f);
    }
    res.gap = grad.cwiseProduct(sd).sum() + penalty_value(grad, radii) - d;
    if (res.gap <= opts.tol) {
      res.converged = true;
      break;
    }

    // BB1 step from the previous pair, clamped
    if (iter > 0) {
      const Eigen::MatrixXd sdiff = w - w_prev;
      const Eigen::MatrixXd ydiff = grad_prev - grad;
      const double sy = sdiff.cwiseProduct(ydiff).sum();
      const double ss = sdiff.squaredNorm();
      if (sy > 0.0 && std::isfinite(sy)) {
        step = std::clamp(ss / sy, opts.step_min, opts.step_max);
      }
    }

    w_prev = w;
    grad_prev = grad;

    double t = step;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Eigen::MatrixXd w_try = w_prev + t * grad_prev;
      project_feasible(w_try, sd, radii);
      Eigen::LLT<Eigen::MatrixXd> llt_try(w_try);
      if (llt_try.info() == Eigen::Success) {
        const double f_try = logdet_llt(llt_try, d);
        const double slope = grad_prev.cwiseProduct(w_try - w_prev).sum();
        if (std::isfinite(f_try) && f_try >= f + opts.armijo * slope - 1e-15 * std::abs(f)) {
          if (f_try <= f + 1e-15 * (1.0 + std::abs(f))) {
            ++stall;
          } else {
            stall = 0;
          }
          w = std::move(w_try);
          llt = std::move(llt_try);
          f = f_try;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted || stall >= 5) {
      break;  // no further progress possible at floating-point resolution
    }
    grad = llt.solve(Eigen::MatrixXd::Identity(d, d));
    grad = 0.5 * (grad + grad.transpose()).eval();
  }

  res.iterations = iter;
  Eigen::MatrixXd omega = llt.solve(Eigen::MatrixXd::Identity(d, d));
  res.omega = SymMatrix::mirror_upper(0.5 * (omega + omega.transpose()));
  res.sigma = SymMatrix::mirror_upper(w);
  res.gap = duality_gap(res.sigma, s, radii);
  if (res.gap <= opts.tol) {
    res.converged = true;
  }
  res.objective = primal_objective(res.omega, s, radii);
  return res;
}

FitResult fit_l1(const SymMatrix& s, const SymMatrix& penalties, int n, const SolverOptions& opts) {
  if (penalties.dim() != s.dim()) {
    throw InvalidInputError("fit_l1: penalty matrix dimension mismatch");
  }
  return fit_penalized(s, l1_radii(penalties, n), opts);
}

FitResult fit_gl12(const SymMatrix& s, const Partition& p, const PenaltyConfig& c, int n,
                   const SolverOptions& opts) {
  if (p.dim() != s.dim()) {
    throw InvalidInputError("fit_gl12: partition dimension mismatch");
  }
  return fit_penalized(s, gl12_radii(p, c, n), opts);
}

double kkt_residual(const SymMatrix& omega, const SymMatrix& s, const DualRadii& radii,
                    double zero_tol) {
  const int d = omega.dim();
  if (radii.dim() != d || s.dim() != d) {
    throw InvalidInputError("kkt_residual: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(omega.dense());
  if (llt.info() != Eigen::Success) {
    throw DomainError("kkt_residual: omega is not positive-definite");
  }
  Eigen::MatrixXd grad = llt.solve(Eigen::MatrixXd::Identity(d, d)) - s.dense();
  grad = 0.5 * (grad + grad.transpose()).eval();

  const double zeta = zero_tol * std::max(1.0, omega.dense().cwiseAbs().maxCoeff());
  double residual = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      if (radii.ball_id(i, j) >= 0) {
        continue;
      }
      const double r = radii.box(i, j);
      const double v = omega(i, j);
      double viol;
      if (std::abs(v) > zeta) {
        viol = std::abs(grad(i, j) - r * (v > 0.0 ? 1.0 : -1.0));
      } else {
        viol = std::max(0.0, std::abs(grad(i, j)) - r);
      }
      residual = std::max(residual, viol);
    }
  }
  for (const BlockBall& ball : radii.balls) {
    double vsq = 0.0;
    double gsq = 0.0;
    for (auto [i, j] : ball.entries) {
      vsq += omega(i, j) * omega(i, j);
      gsq += grad(i, j) * grad(i, j);
    }
    const double vnorm = std::sqrt(vsq);
    double viol;
    if (vnorm > zeta) {
      double diff_sq = 0.0;
      for (auto [i, j] : ball.entries) {
        const double want = ball.radius * omega(i, j) / vnorm;
        const double delta = grad(i, j) - want;
        diff_sq += delta * delta;
      }
      viol = std::sqrt(diff_sq);
    } else {
      viol = std::max(0.0, std::sqrt(gsq) - ball.radius);
    }
    residual = std::max(residual, viol);
  }
  return residual;
}

namespace {

struct OneDimPenalty {
  // pen(t) = rate * |t| for kinked entries, rate * sqrt(gamma^2 + t^2) for
  // smooth group entries (rate already includes the both-triangles factor)
  double rate = 0.0;
  double gamma = 0.0;
  bool smooth = false;
  double deriv(double t) const {
    if (smooth) {
      return rate * t / std::sqrt(gamma * gamma + t * t);
    }
    return rate * (t > 0.0 ? 1.0 : -1.0);
  }
};

// maximize log f(t) - beta t - pen(t) on (lo, hi); f positive on the open
// interval and zero at finite endpoints, so the maximizer is interior and the
// derivative is strictly decreasing
double maximize_entry(const DetPoly& poly, double beta, const OneDimPenalty& pen, double lo,
                      double hi) {
  auto phi = [&](double t, double pen_deriv) {
    const double s = t - poly.center;
    const double f = (poly.a * s + poly.b) * s + poly.c;
    if (!(f > 0.0)) {
      // roundoff pushed the evaluation onto/past the det=0 boundary; the
      // derivative sign is determined by which endpoint we are near
      const double dist_lo = t - lo;
      const double dist_hi = std::isfinite(hi) ? hi - t : kInf;
      return dist_lo < dist_hi ? kInf : -kInf;
    }
    const double fp = 2.0 * poly.a * s + poly.b;
    return fp / f - beta - pen_deriv;
  };

  const bool unbounded_hi = !std::isfinite(hi);
  double left = lo;
  double right = hi;

  if (!pen.smooth && lo < 0.0 && (unbounded_hi || hi > 0.0)) {
    // kink: check the one-sided derivatives at zero
    const double phi_plus = phi(0.0, pen.rate);
    const double phi_minus = phi(0.0, -pen.rate);
    if (phi_plus <= 0.0 && phi_minus >= 0.0) {
      return 0.0;
    }
    if (phi_plus > 0.0) {
      left = 0.0;
    } else {
      right = 0.0;
    }
  }

  auto deriv_at = [&](double t) { return phi(t, pen.deriv(t)); };

  // bracket: move slightly inside the interval; expand right when unbounded
  double width = std::isfinite(right) ? right - left : 1.0 + std::abs(left);
  double a = left + 1e-12 * width;
  double b;
  if (std::isfinite(right)) {
    b = right - 1e-12 * width;
  } else {
    b = std::max(left + width, poly.center + 1.0);
    for (int k = 0; k < 200 && deriv_at(b) > 0.0; ++k) {
      b = left + 2.0 * (b - left);
    }
  }
  if (deriv_at(a) <= 0.0) {
    return a;  // derivative already negative at the edge: maximum pinned there
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) {
      break;
    }
    if (deriv_at(mid) > 0.0) {
      a = mid;
    } else {
      b = mid;
    }
    if (b - a <= 1e-14 * (1.0 + std::abs(a) + std::abs(b))) {
      break;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

SymMatrix partial_refit(const SymMatrix& omega, const SymMatrix& s, const std::vector<int>& rows,
                        const DualRadii& radii, const SolverOptions& opts) {
  const int d = omega.dim();
  if (s.dim() != d || radii.dim() != d) {
    throw InvalidInputError("partial_refit: dimension mismatch");
  }
  for (int r : rows) {
    if (r < 0 || r >= d) {
      throw InvalidInputError("partial_refit: row index out of range");
    }
  }
  if (!is_pd(omega)) {
    throw DomainError("partial_refit: starting point is not positive-definite");
  }

  std::vector<char> in_rows(d, 0);
  for (int r : rows) {
    in_rows[r] = 1;
  }
  std::vector<std::pair<int, int>> free_entries;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      if (in_rows[i] || in_rows[j]) {
        free_entries.emplace_back(i, j);
      }
    }
  }
  if (free_entries.empty()) {
    return omega;
  }

  SymMatrix x = omega;
  double obj = primal_objective(x, s, radii);
  const int max_sweeps = 500;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (auto [i, j] : free_entries) {
      const DetPoly poly = det_poly(x, i, j);
      const PdInterval iv = pd_interval(x, i, j);
      OneDimPenalty pen;
      double beta;
      if (i == j) {
        beta = s(i, i);
        pen.rate = radii.box(i, i);
        if (beta + pen.rate <= 1e-300) {
          throw DomainError("partial_refit: unbounded diagonal subproblem");
        }
        // linear determinant: closed-form stationary point
        const double t = poly.center + 1.0 / (beta + pen.rate) - poly.c / poly.b;
        x.set(i, i, std::max(t, iv.lo + 1e-14 * (1.0 + std::abs(iv.lo))));
        continue;
      }
      beta = 2.0 * s(i, j);
      const int ball = radii.ball_id(i, j);
      if (ball < 0) {
        pen.rate = 2.0 * radii.box(i, j);
        pen.smooth = false;
      } else {
        double gamma_sq = 0.0;
        for (auto [a, b] : radii.balls[ball].entries) {
          if (a == i && b == j) {
            continue;
          }
          gamma_sq += x(a, b) * x(a, b);
        }
        pen.rate = 2.0 * radii.balls[ball].radius;
        pen.gamma = std::sqrt(gamma_sq);
        pen.smooth = pen.gamma > 1e-14;
      }
      x.set(i, j, maximize_entry(poly, beta, pen, iv.lo, iv.hi));
    }
    const double obj_new = primal_objective(x, s, radii);
    if (obj_new - obj <= 1e-10 * (1.0 + std::abs(obj_new))) {
      obj = std::max(obj, obj_new);
      break;
    }
    obj = obj_new;
  }
  (void)opts;
  return x;
}

SymMatrix partial_refit(const SymMatrix& omega, const SymMatrix& s, const std::vector<int>& rows,
                        const Partition& p, const PenaltyConfig& c, PriorKind kind, int n,
                        const SolverOptions& opts) {
  return partial_refit(omega, s, rows, radii_for(kind, p, c, n), opts);
}

}  // namespace blockprec

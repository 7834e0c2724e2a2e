#include "tpmtl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tpmtl {

void validate(const DesignMatrices& dm) {
  if (dm.X.rows() < 1 || dm.X.cols() < 1) {
    throw ShapeMismatch("X must be at least 1x1");
  }
  if (dm.Y.rows() != dm.X.rows()) {
    throw ShapeMismatch("X and Y row counts differ");
  }
  if (dm.Y.cols() < 2) throw ShapeMismatch("Y must have M >= 2 columns");
  for (Eigen::Index i = 0; i < dm.Y.rows(); ++i) {
    int ones = 0;
    for (Eigen::Index j = 0; j < dm.Y.cols(); ++j) {
      const double v = dm.Y(i, j);
      if (v == 1.0) {
        ++ones;
      } else if (v != 0.0) {
        throw ValidationError("Y entries must be 0 or 1");
      }
    }
    if (ones != 1) throw ValidationError("each Y row needs exactly one 1");
  }
}

void validate(const Hyperparams& hp) {
  if (hp.lambda < 0 || hp.gamma < 0 || hp.theta < 0) {
    throw ValidationError("regularization weights must be non-negative");
  }
}

void validate(const SolverConfig& cfg) {
  if (cfg.fista_tol <= 0 || cfg.outer_tol <= 0 || cfg.eig_floor <= 0) {
    throw ValidationError("solver tolerances must be > 0");
  }
  if (cfg.fista_max_iter < 1 || cfg.outer_max_iter < 1) {
    throw ValidationError("iteration caps must be >= 1");
  }
  if (cfg.backtracking_eta <= 1.0) {
    throw ValidationError("backtracking factor must be > 1");
  }
}

namespace {

void check_shapes(const Matrix& X, const Matrix& Y, const Matrix& W,
                  const Matrix& omega) {
  if (X.cols() != W.rows() || X.rows() != Y.rows() || W.cols() != Y.cols()) {
    throw ShapeMismatch("X " + std::to_string(X.rows()) + "x" +
                        std::to_string(X.cols()) + ", W " +
                        std::to_string(W.rows()) + "x" +
                        std::to_string(W.cols()) + ", Y " +
                        std::to_string(Y.rows()) + "x" +
                        std::to_string(Y.cols()) + " are inconsistent");
  }
  if (omega.rows() != omega.cols() || omega.rows() != W.cols()) {
    throw ShapeMismatch("omega must be MxM with M = W columns");
  }
}

double l21_norm(const Matrix& W) {
  double s = 0.0;
  for (Eigen::Index r = 0; r < W.rows(); ++r) s += W.row(r).norm();
  return s;
}

double penalty_value(const Matrix& W, PenaltyKind penalty) {
  return penalty == PenaltyKind::kRowL2 ? l21_norm(W)
                                        : W.cwiseAbs().sum();
}

Matrix apply_prox(const Matrix& V, double tau, PenaltyKind penalty) {
  return penalty == PenaltyKind::kRowL2 ? prox_l21(V, tau) : prox_l1(V, tau);
}

// Largest eigenvalue of X^T X by power iteration on v -> X^T (X v).
double sigma_max_xtx(const Matrix& X) {
  if (X.cols() == 0 || X.rows() == 0) return 0.0;
  Vector v = Vector::Ones(X.cols());
  v.normalize();
  double eig = 0.0;
  for (int it = 0; it < 60; ++it) {
    Vector u = X.transpose() * (X * v);
    const double n = u.norm();
    if (n == 0.0) return 0.0;
    v = u / n;
    eig = n;
  }
  return eig;
}

struct SmoothProblem {
  const Matrix& X;
  const Matrix& Y;
  Matrix omega_inv;  // empty when lambda == 0
  Hyperparams hp;

  double value(const Matrix& W) const {
    double v = 0.5 * (X * W - Y).squaredNorm() + hp.gamma * W.squaredNorm();
    if (hp.lambda > 0) {
      v += hp.lambda * (W * omega_inv).cwiseProduct(W).sum();
    }
    return v;
  }

  Matrix gradient(const Matrix& W) const {
    Matrix g = X.transpose() * (X * W - Y) + 2.0 * hp.gamma * W;
    if (hp.lambda > 0) g += 2.0 * hp.lambda * W * omega_inv;
    return g;
  }
};

}  // namespace

Matrix floored_inverse(const Matrix& omega, double eig_floor) {
  if (omega.rows() != omega.cols()) {
    throw ShapeMismatch("omega must be square");
  }
  const Matrix sym = 0.5 * (omega + omega.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) {
    throw NonFiniteEncountered("omega eigendecomposition failed");
  }
  const double m = static_cast<double>(omega.rows());
  const double floor = eig_floor * std::max(sym.trace(), eig_floor) / m;
  Vector inv_evals = es.eigenvalues();
  for (Eigen::Index i = 0; i < inv_evals.size(); ++i) {
    inv_evals[i] = 1.0 / std::max(inv_evals[i], floor);
  }
  const Matrix inv = es.eigenvectors() * inv_evals.asDiagonal() *
                     es.eigenvectors().transpose();
  return 0.5 * (inv + inv.transpose());
}

double composite_objective(const Matrix& X, const Matrix& Y, const Matrix& W,
                           const Matrix& omega, const Hyperparams& hp,
                           PenaltyKind penalty, double eig_floor) {
  check_shapes(X, Y, W, omega);
  SmoothProblem prob{X, Y, Matrix(), hp};
  if (hp.lambda > 0) prob.omega_inv = floored_inverse(omega, eig_floor);
  return prob.value(W) + hp.theta * penalty_value(W, penalty);
}

double objective(const Matrix& X, const Matrix& Y, const Matrix& W,
                 const Matrix& omega, const Hyperparams& hp,
                 double eig_floor) {
  return composite_objective(X, Y, W, omega, hp, PenaltyKind::kRowL2,
                             eig_floor);
}

Matrix smooth_gradient(const Matrix& X, const Matrix& Y, const Matrix& W,
                       const Matrix& omega, const Hyperparams& hp,
                       double eig_floor) {
  check_shapes(X, Y, W, omega);
  SmoothProblem prob{X, Y, Matrix(), hp};
  if (hp.lambda > 0) prob.omega_inv = floored_inverse(omega, eig_floor);
  return prob.gradient(W);
}

Matrix prox_l21(const Matrix& V, double tau) {
  if (tau < 0) throw ValidationError("prox threshold must be >= 0");
  Matrix out = V;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double n = out.row(r).norm();
    if (n <= tau) {
      out.row(r).setZero();
    } else if (tau > 0) {
      out.row(r) *= 1.0 - tau / n;
    }
  }
  return out;
}

Matrix prox_l1(const Matrix& V, double tau) {
  if (tau < 0) throw ValidationError("prox threshold must be >= 0");
  return V.unaryExpr([tau](double v) {
    const double mag = std::abs(v) - tau;
    return mag > 0 ? (v > 0 ? mag : -mag) : 0.0;
  });
}

namespace {

struct ProxStep {
  Matrix W;
  double step;
};

// One backtracked proximal step from `point`: shrink the step until the
// quadratic upper bound of the smooth part holds.
ProxStep backtracked_step(const SmoothProblem& prob, const Matrix& point,
                          double theta, PenaltyKind penalty, double step,
                          double eta) {
  const Matrix grad = prob.gradient(point);
  const double f_point = prob.value(point);
  for (;;) {
    Matrix w = apply_prox(point - step * grad, theta * step, penalty);
    const Matrix diff = w - point;
    const double quad = f_point + grad.cwiseProduct(diff).sum() +
                        diff.squaredNorm() / (2.0 * step);
    const double f_w = prob.value(w);
    if (f_w <= quad + 1e-12 * std::max(1.0, std::abs(quad)) ||
        step < 1e-18) {
      return {std::move(w), step};
    }
    step /= eta;
  }
}

}  // namespace

Matrix solve_w(const Matrix& X, const Matrix& Y, const Matrix& omega,
               const Hyperparams& hp, const SolverConfig& cfg,
               const Matrix& W_init, PenaltyKind penalty,
               std::vector<FistaTraceRow>* trace) {
  validate(hp);
  validate(cfg);
  check_shapes(X, Y, W_init, omega);

  SmoothProblem prob{X, Y, Matrix(), hp};
  double lip = sigma_max_xtx(X) + 2.0 * hp.gamma;
  if (hp.lambda > 0) {
    prob.omega_inv = floored_inverse(omega, cfg.eig_floor);
    Eigen::SelfAdjointEigenSolver<Matrix> es(prob.omega_inv);
    lip += 2.0 * hp.lambda * es.eigenvalues().maxCoeff();
  }
  double step = 1.0 / std::max(lip, 1e-12);

  Matrix W = W_init;
  Matrix Z = W;
  double t = 1.0;
  double f_cur = prob.value(W) + hp.theta * penalty_value(W, penalty);
  if (!std::isfinite(f_cur)) {
    throw NonFiniteEncountered("objective not finite at W_init");
  }

  for (std::size_t iter = 1; iter <= cfg.fista_max_iter; ++iter) {
    ProxStep s = backtracked_step(prob, Z, hp.theta, penalty, step,
                                  cfg.backtracking_eta);
    double f_new = prob.value(s.W) + hp.theta * penalty_value(s.W, penalty);
    if (!std::isfinite(f_new)) {
      throw NonFiniteEncountered("objective diverged in FISTA");
    }
    if (f_new > f_cur) {
      // Momentum overshoot: restart from the last accepted iterate. The
      // majorization argument makes this step non-increasing up to rounding.
      t = 1.0;
      s = backtracked_step(prob, W, hp.theta, penalty, s.step,
                           cfg.backtracking_eta);
      f_new = prob.value(s.W) + hp.theta * penalty_value(s.W, penalty);
      if (!std::isfinite(f_new)) {
        throw NonFiniteEncountered("objective diverged in FISTA");
      }
      if (f_new > f_cur) break;  // rounding floor reached, keep W
    }
    step = s.step;
    const double rel =
        std::abs(f_cur - f_new) / std::max(1.0, std::abs(f_cur));
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    Z = s.W + ((t - 1.0) / t_next) * (s.W - W);
    W = std::move(s.W);
    t = t_next;
    f_cur = f_new;
    if (trace != nullptr) trace->push_back({iter, f_cur, step, rel});
    if (rel < cfg.fista_tol) break;
  }
  return W;
}

TaskCovariance solve_omega(const Matrix& W) {
  const Eigen::Index m = W.cols();
  if (m < 1) throw ShapeMismatch("W must have at least one column");
  const Matrix a = W.transpose() * W;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) {
    throw NonFiniteEncountered("W^T W eigendecomposition failed");
  }
  Vector sqrt_evals = es.eigenvalues();
  for (Eigen::Index i = 0; i < sqrt_evals.size(); ++i) {
    sqrt_evals[i] = std::sqrt(std::max(sqrt_evals[i], 0.0));
  }
  const double tr = sqrt_evals.sum();
  if (tr <= 0.0) {
    return {Matrix::Identity(m, m) / static_cast<double>(m), true};
  }
  Matrix omega = es.eigenvectors() * (sqrt_evals / tr).asDiagonal() *
                 es.eigenvectors().transpose();
  omega = 0.5 * (omega + omega.transpose());
  return {std::move(omega), false};
}

FitResult fit_alternating(const Matrix& X, const Matrix& Y,
                          const Hyperparams& hp, const SolverConfig& cfg,
                          PenaltyKind penalty) {
  validate(hp);
  validate(cfg);
  const Eigen::Index d = X.cols();
  const Eigen::Index m = Y.cols();

  FitResult res;
  res.W = Matrix::Zero(d, m);
  res.covariance.omega = Matrix::Identity(m, m) / static_cast<double>(m);

  double prev = composite_objective(X, Y, res.W, res.covariance.omega, hp,
                                    penalty, cfg.eig_floor);
  res.objective_trace.push_back(prev);

  for (std::size_t round = 1; round <= cfg.outer_max_iter; ++round) {
    res.W = solve_w(X, Y, res.covariance.omega, hp, cfg, res.W, penalty,
                    &res.fista_trace);
    res.covariance = solve_omega(res.W);
    const double obj = composite_objective(X, Y, res.W, res.covariance.omega,
                                           hp, penalty, cfg.eig_floor);
    res.objective_trace.push_back(obj);
    res.outer_iterations = round;
    const double rel = std::abs(prev - obj) / std::max(1.0, std::abs(prev));
    prev = obj;
    if (rel < cfg.outer_tol) break;
  }
  return res;
}

}  // namespace tpmtl

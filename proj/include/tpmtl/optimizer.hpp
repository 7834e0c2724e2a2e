#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "tpmtl/errors.hpp"

namespace tpmtl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Rows of X are featurized activities; rows of Y are one-hot labels.
struct DesignMatrices {
  Matrix X;  // N x D
  Matrix Y;  // N x M
};

// Throws ShapeMismatch / ValidationError when the invariants fail
// (one 1 per Y row, N >= 1, M >= 2).
void validate(const DesignMatrices& dm);

struct Hyperparams {
  double lambda = 0.05;  // task-relatedness weight
  double gamma = 0.001;  // ridge weight
  double theta = 0.01;   // group-sparsity weight
};

void validate(const Hyperparams& hp);

struct SolverConfig {
  std::size_t fista_max_iter = 5000;
  double fista_tol = 1e-8;  // relative objective change
  std::size_t outer_max_iter = 50;
  double outer_tol = 1e-6;
  double eig_floor = 1e-8;  // relative floor for omega eigenvalues
  double backtracking_eta = 2.0;
};

void validate(const SolverConfig& cfg);

// Symmetric PSD unit-trace task-relatedness matrix.
struct TaskCovariance {
  Matrix omega;  // M x M
  bool degenerate = false;  // true when W = 0 forced the I/M fallback
};

// Non-smooth penalty attached to the smooth loss. kRowL2 is the l2,1 group
// penalty; kElementwiseL1 gives the Lasso baseline its prox.
enum class PenaltyKind { kRowL2, kElementwiseL1 };

struct FistaTraceRow {
  std::size_t iter;
  double objective;
  double step_size;
  double rel_change;
};

struct FitResult {
  Matrix W;
  TaskCovariance covariance;
  std::vector<double> objective_trace;  // initial value, then one per round
  std::size_t outer_iterations = 0;
  std::vector<FistaTraceRow> fista_trace;
};

// Eigendecompose omega, floor eigenvalues at eig_floor * (trace/M), invert,
// re-symmetrize. Keeps the objective finite for singular omega.
Matrix floored_inverse(const Matrix& omega, double eig_floor);

// 1/2 ||XW - Y||_F^2 + lambda tr(W omega^-1 W^T) + gamma ||W||_F^2
// + theta ||W||_{2,1}.
double objective(const Matrix& X, const Matrix& Y, const Matrix& W,
                 const Matrix& omega, const Hyperparams& hp,
                 double eig_floor = SolverConfig{}.eig_floor);

// Same composite value with a selectable non-smooth penalty (||W||_1 for the
// Lasso baseline).
double composite_objective(const Matrix& X, const Matrix& Y, const Matrix& W,
                           const Matrix& omega, const Hyperparams& hp,
                           PenaltyKind penalty,
                           double eig_floor = SolverConfig{}.eig_floor);

// Gradient of the smooth part: X^T(XW - Y) + 2 lambda W omega^-1 + 2 gamma W.
Matrix smooth_gradient(const Matrix& X, const Matrix& Y, const Matrix& W,
                       const Matrix& omega, const Hyperparams& hp,
                       double eig_floor = SolverConfig{}.eig_floor);

// Row-wise shrinkage: row <- max(0, 1 - tau/||row||_2) * row.
Matrix prox_l21(const Matrix& V, double tau);

// Element-wise soft threshold.
Matrix prox_l1(const Matrix& V, double tau);

// FISTA on the W-subproblem with backtracking line search and monotone
// restart. The composite objective is non-increasing across accepted
// iterates. Throws NonFiniteEncountered on divergence.
Matrix solve_w(const Matrix& X, const Matrix& Y, const Matrix& omega,
               const Hyperparams& hp, const SolverConfig& cfg,
               const Matrix& W_init, PenaltyKind penalty = PenaltyKind::kRowL2,
               std::vector<FistaTraceRow>* trace = nullptr);

// Closed-form omega update: (W^T W)^{1/2} / tr((W^T W)^{1/2}) via
// eigendecomposition with eigenvalues clamped at zero. W = 0 yields the
// maximum-entropy fallback I/M with the degenerate flag set.
TaskCovariance solve_omega(const Matrix& W);

// Alternating minimization: omega starts at I/M, then repeat
// { solve_w; solve_omega } until the relative objective decrease drops
// below outer_tol or outer_max_iter rounds.
FitResult fit_alternating(const Matrix& X, const Matrix& Y,
                          const Hyperparams& hp, const SolverConfig& cfg,
                          PenaltyKind penalty = PenaltyKind::kRowL2);

}  // namespace tpmtl

#pragma once

#include <memory>

#include "cholband/penalty.hpp"
#include "cholband/types.hpp"

namespace cholband {

struct SolverConfig {
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  int max_iter = 10000;
  double rho_init = 1.0;
  int rho_check_period = 10;
};

/// One row subproblem: minimize
///   -2 log(b_r) + b^T S^(r) b + lambda * P_r(b)
/// over b in R^r with b_r > 0, where S^(r) is the leading r x r block of the
/// shared Gram matrix.
struct RowProblem {
  const SymMatrix* S;  // full Gram; only the leading r x r block is read
  int r;               // 1-based row index, >= 2
  double lambda;       // >= 0
  WeightScheme scheme;
};

class RowSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cached pieces of the beta update that depend only on (S, r, rho): the
// Cholesky factor of M = 2 S_{-r,-r} + rho I, t1 = M^{-1} S_{-r,r}, and the
// scalar A. Refreshed only when rho changes.
class BetaCache {
 public:
  BetaCache(const SymMatrix& S, int r);
  void refresh(double rho);
  double rho() const { return rho_; }
  double a_coef() const { return a_; }
  const Vector& t1() const { return t1_; }
  /// x <- M^{-1} x
  void solve_in_place(std::span<double> x) const;

 private:
  const SymMatrix* S_;
  int r_;
  double rho_ = -1.0;
  double a_ = 0.0;
  Vector chol_;  // packed (r-1) x (r-1) factor
  Vector t1_;
};

/// ADMM iterate for one row. `u` is the scaled dual multiplier (the paper's
/// unscaled multiplier is rho * u).
struct RowState {
  Vector beta, gamma, u;
  double rho = 1.0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  int iter = 0;
  DualBlocks prox_warm{1};
  std::unique_ptr<BetaCache> cache;
};

struct RowSolution {
  Vector row;           // length r; leading zero run is exact, row_r > 0
  int iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;
};

/// Closed-form minimizer of the augmented Lagrangian over beta at the
/// current (gamma, u, rho). Throws RowSolverError if A >= 0 (corrupted input).
Vector beta_update(const RowState& state, const RowProblem& prob, BetaCache& cache);

/// Dynamic penalty-parameter rule: rho doubles (and u halves) when the primal
/// residual dominates 10x, halves (u doubles) in the mirrored case.
void rho_update(RowState& state);

/// Runs ADMM until the scaled primal/dual residual criterion is met or
/// max_iter is hit. `state`, when given, supplies a warm start and receives
/// the final iterate (for path fits).
RowSolution solve_row(const RowProblem& prob, const SolverConfig& cfg, RowState* state = nullptr);

}  // namespace cholband

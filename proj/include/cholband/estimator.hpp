#pragma once

#include "cholband/rowsolver.hpp"
#include "cholband/types.hpp"

namespace cholband {

struct FitResult {
  LowerTriangular L_hat{1};
  double lambda = 0.0;
  std::vector<int> bandwidths;  // K_r per row (row 1 is always 0)
  int converged_rows = 0;
  double kkt_max = 0.0;
  long total_iterations = 0;
};

struct SupportStats {
  double sensitivity = 0.0;
  double specificity = 0.0;
  bool signed_exact = false;
};

/// Penalized fit of the inverse Cholesky factor. Row 1 is closed form,
/// rows 2..p are independent ADMM subproblems dispatched over `threads`
/// workers (largest rows first); output is bitwise identical for any worker
/// count. `center` subtracts column means first (off by default).
FitResult fit(const SampleMatrix& X, double lambda, WeightScheme scheme, const SolverConfig& cfg,
              int threads = 1, bool center = false);

/// Fits a strictly decreasing lambda grid with per-row warm starts.
std::vector<FitResult> fit_path(const SampleMatrix& X, const std::vector<double>& grid,
                                WeightScheme scheme, const SolverConfig& cfg, int threads = 1,
                                bool center = false);

/// Omega = L_hat^T L_hat.
SymMatrix omega(const FitResult& fit);

/// Sensitivity / specificity over strictly-lower-triangular positions, and
/// exact signed-support agreement. Estimates below 1e-10 in magnitude count
/// as zero.
SupportStats sign_support(const FitResult& fit, const LowerTriangular& L_true);

/// Smallest lambda on a doubling search whose fit is diagonal (all
/// bandwidths zero).
double lambda_max(const SampleMatrix& X, WeightScheme scheme, const SolverConfig& cfg,
                  int threads = 1, bool center = false);

/// Column-mean-centered copy (helper shared with cross-validation).
SampleMatrix centered_copy(const SampleMatrix& X);

}  // namespace cholband

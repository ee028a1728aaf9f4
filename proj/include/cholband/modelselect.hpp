#pragma once

#include <cstdint>

#include "cholband/estimator.hpp"

namespace cholband {

struct CVResult {
  std::vector<double> lambdas;
  Vector mean_score;  // validation negative log-likelihood per sample
  Vector se_score;    // standard error across folds
  int best_idx = 0;
  int one_se_idx = 0;
};

/// Log-spaced grid of `count` values from the numerically determined
/// lambda_max down to ratio * lambda_max, strictly decreasing.
std::vector<double> lambda_grid(const SampleMatrix& X, WeightScheme scheme,
                                const SolverConfig& cfg, int count = 100, double ratio = 1e-3,
                                int threads = 1, bool center = false);

/// k-fold cross-validation along a decreasing grid with per-row warm starts.
/// Folds are contiguous blocks of a seeded shuffle; each fold's score is the
/// per-sample validation negative log-likelihood
///   -2 sum_r log(L_rr) + (1/|val|) sum_i ||L x_i||^2.
/// one_se_idx picks the largest lambda within one standard error of the best.
CVResult cross_validate(const SampleMatrix& X, const std::vector<double>& grid, int k,
                        WeightScheme scheme, const SolverConfig& cfg, std::uint64_t seed,
                        int threads = 1, bool center = false);

}  // namespace cholband

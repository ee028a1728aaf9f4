#pragma once

#include <cstdint>

#include "cholband/modelselect.hpp"
#include "cholband/types.hpp"

namespace cholband {

enum class ClassifierMode { LDA, QDA };

struct ClassSummary {
  int label = 0;
  Vector mean;
  double log_prior = 0.0;
  int factor_idx = 0;  // index into ClassModel::factors (shared for LDA)
};

/// Discriminant model: class means, log priors, and one shared (LDA) or
/// per-class (QDA) inverse-Cholesky factor, with L*mu cached per class.
struct ClassModel {
  ClassifierMode mode = ClassifierMode::LDA;
  std::vector<ClassSummary> classes;
  std::vector<LowerTriangular> factors;
  std::vector<Vector> lmu;        // factors[factor_idx] * mean, per class
  Vector half_lmu_sq;             // 0.5 * ||L mu||^2, per class
};

struct ClassifierOptions {
  int cv_folds = 5;
  int grid_count = 100;
  double grid_ratio = 1e-3;
  WeightScheme scheme = WeightScheme::Quadratic;
  SolverConfig solver;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// Mean prediction error of the row regressions on one held-out vector:
/// (1/(p-1)) sum_{r>=2} (L x)_r^2. Requires p >= 2.
double prediction_error(const LowerTriangular& L_hat, std::span<const double> x);

/// Assembles a model from parts, validating priors and caching L*mu.
/// Also the test hook for forcing QDA onto a shared factor.
ClassModel make_class_model(ClassifierMode mode, std::vector<ClassSummary> classes,
                            std::vector<LowerTriangular> factors);

/// LDA: class-center, pool, CV-select lambda, fit one shared factor.
/// QDA: per class, CV-select and fit its own factor.
ClassModel fit_classifier(const SampleMatrix& X, const std::vector<int>& y, ClassifierMode mode,
                          const ClassifierOptions& opt);

/// Label maximizing (Lx)^T(L mu) - 0.5||L mu||^2 + log prior; ties go to the
/// lowest class index.
int classify(const ClassModel& model, std::span<const double> x);

}  // namespace cholband

#include "cholband/apps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace cholband {

double prediction_error(const LowerTriangular& L_hat, std::span<const double> x) {
  const int p = L_hat.dim();
  if (p < 2) throw std::invalid_argument("prediction_error: need p >= 2");
  if (int(x.size()) != p) throw std::invalid_argument("prediction_error: length mismatch");
  double total = 0.0;
  for (int r = 1; r < p; ++r) {
    auto row = L_hat.row(r);
    double s = 0.0;
    for (int c = 0; c <= r; ++c) s += row[c] * x[c];
    total += s * s;
  }
  return total / double(p - 1);
}

ClassModel make_class_model(ClassifierMode mode, std::vector<ClassSummary> classes,
                            std::vector<LowerTriangular> factors) {
  if (classes.size() < 2) throw std::invalid_argument("class model: need at least two classes");
  if (mode == ClassifierMode::LDA && factors.size() != 1)
    throw std::invalid_argument("class model: LDA stores exactly one shared factor");
  double prior_sum = 0.0;
  for (const auto& c : classes) {
    if (c.factor_idx < 0 || c.factor_idx >= int(factors.size()))
      throw std::invalid_argument("class model: factor index out of range");
    prior_sum += std::exp(c.log_prior);
  }
  if (std::abs(prior_sum - 1.0) > 1e-12)
    throw std::invalid_argument("class model: priors must sum to one");

  ClassModel m;
  m.mode = mode;
  m.classes = std::move(classes);
  m.factors = std::move(factors);
  m.lmu.reserve(m.classes.size());
  m.half_lmu_sq.reserve(m.classes.size());
  for (const auto& c : m.classes) {
    const LowerTriangular& L = m.factors[std::size_t(c.factor_idx)];
    const int p = L.dim();
    if (int(c.mean.size()) != p) throw std::invalid_argument("class model: mean length mismatch");
    Vector v(std::size_t(p));
    double sq = 0.0;
    for (int r = 0; r < p; ++r) {
      auto row = L.row(r);
      double s = 0.0;
      for (int j = 0; j <= r; ++j) s += row[j] * c.mean[j];
      v[r] = s;
      sq += s * s;
    }
    m.lmu.push_back(std::move(v));
    m.half_lmu_sq.push_back(0.5 * sq);
  }
  return m;
}

namespace {

// Rows of X belonging to `idx`, centered by the class mean.
SampleMatrix centered_class_rows(const SampleMatrix& X, const std::vector<int>& idx,
                                 const Vector& mean) {
  const int p = X.cols();
  SampleMatrix out(int(idx.size()), p);
  for (int t = 0; t < int(idx.size()); ++t) {
    auto src = X.row(idx[std::size_t(t)]);
    for (int j = 0; j < p; ++j) out(t, j) = src[j] - mean[j];
  }
  return out;
}

LowerTriangular cv_fit(const SampleMatrix& data, const ClassifierOptions& opt) {
  const std::vector<double> grid = lambda_grid(data, opt.scheme, opt.solver, opt.grid_count,
                                               opt.grid_ratio, opt.threads);
  const CVResult cv = cross_validate(data, grid, opt.cv_folds, opt.scheme, opt.solver, opt.seed,
                                     opt.threads);
  const FitResult f =
      fit(data, grid[std::size_t(cv.best_idx)], opt.scheme, opt.solver, opt.threads);
  return f.L_hat;
}

}  // namespace

ClassModel fit_classifier(const SampleMatrix& X, const std::vector<int>& y, ClassifierMode mode,
                          const ClassifierOptions& opt) {
  const int n = X.rows(), p = X.cols();
  if (int(y.size()) != n) throw std::invalid_argument("fit_classifier: label count mismatch");

  std::map<int, std::vector<int>> by_label;
  for (int i = 0; i < n; ++i) by_label[y[std::size_t(i)]].push_back(i);
  if (by_label.size() < 2) throw std::invalid_argument("fit_classifier: need at least two classes");
  for (const auto& [label, idx] : by_label)
    if (idx.size() < 2)
      throw std::invalid_argument("fit_classifier: class " + std::to_string(label) +
                                  " has fewer than two samples");

  std::vector<ClassSummary> classes;
  std::vector<Vector> means;
  for (const auto& [label, idx] : by_label) {
    Vector mean(std::size_t(p), 0.0);
    for (int i : idx) {
      auto row = X.row(i);
      for (int j = 0; j < p; ++j) mean[j] += row[j];
    }
    for (double& v : mean) v /= double(idx.size());
    ClassSummary c;
    c.label = label;
    c.mean = mean;
    c.log_prior = std::log(double(idx.size()) / double(n));
    classes.push_back(std::move(c));
    means.push_back(std::move(mean));
  }

  std::vector<LowerTriangular> factors;
  if (mode == ClassifierMode::LDA) {
    // pool the class-centered rows and fit one factor
    SampleMatrix pooled(n, p);
    int t = 0, c = 0;
    for (const auto& [label, idx] : by_label) {
      for (int i : idx) {
        auto src = X.row(i);
        for (int j = 0; j < p; ++j) pooled(t, j) = src[j] - means[std::size_t(c)][j];
        ++t;
      }
      ++c;
    }
    factors.push_back(cv_fit(pooled, opt));
    for (auto& cls : classes) cls.factor_idx = 0;
  } else {
    int c = 0;
    for (const auto& [label, idx] : by_label) {
      const SampleMatrix centered = centered_class_rows(X, idx, means[std::size_t(c)]);
      factors.push_back(cv_fit(centered, opt));
      classes[std::size_t(c)].factor_idx = c;
      ++c;
    }
  }
  return make_class_model(mode, std::move(classes), std::move(factors));
}

int classify(const ClassModel& model, std::span<const double> x) {
  const int nc = int(model.classes.size());
  const int p = model.factors.front().dim();
  if (int(x.size()) != p) throw std::invalid_argument("classify: length mismatch");

  // Lx per distinct factor (one for LDA, per class for QDA)
  std::vector<Vector> lx(model.factors.size());
  for (std::size_t f = 0; f < model.factors.size(); ++f) {
    const LowerTriangular& L = model.factors[f];
    lx[f].resize(std::size_t(p));
    for (int r = 0; r < p; ++r) {
      auto row = L.row(r);
      double s = 0.0;
      for (int j = 0; j <= r; ++j) s += row[j] * x[j];
      lx[f][std::size_t(r)] = s;
    }
  }

  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < nc; ++c) {
    const auto& cls = model.classes[std::size_t(c)];
    const Vector& v = lx[std::size_t(cls.factor_idx)];
    const Vector& lm = model.lmu[std::size_t(c)];
    double dot = 0.0;
    for (int r = 0; r < p; ++r) dot += v[std::size_t(r)] * lm[std::size_t(r)];
    const double score = dot - model.half_lmu_sq[std::size_t(c)] + cls.log_prior;
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return model.classes[std::size_t(best)].label;
}

}  // namespace cholband

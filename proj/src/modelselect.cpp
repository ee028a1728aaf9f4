#include "cholband/modelselect.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "cholband/rng.hpp"

namespace cholband {

namespace {

// Validation NLL per sample for one fitted factor.
double validation_score(const LowerTriangular& L, const SampleMatrix& X,
                        const std::vector<int>& val_idx, const Vector& col_means) {
  const int p = L.dim();
  double logdet_term = 0.0;
  for (int r = 0; r < p; ++r) logdet_term -= 2.0 * std::log(L(r, r));

  double quad = 0.0;
  Vector x(std::size_t(p));
  for (int i : val_idx) {
    auto row = X.row(i);
    for (int j = 0; j < p; ++j) x[j] = row[j] - col_means[j];
    for (int r = 0; r < p; ++r) {
      auto lr = L.row(r);
      double s = 0.0;
      for (int c = 0; c <= r; ++c) s += lr[c] * x[c];
      quad += s * s;
    }
  }
  return logdet_term + quad / double(val_idx.size());
}

}  // namespace

std::vector<double> lambda_grid(const SampleMatrix& X, WeightScheme scheme,
                                const SolverConfig& cfg, int count, double ratio, int threads,
                                bool center) {
  if (count < 2) throw std::invalid_argument("lambda_grid: count must be at least 2");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("lambda_grid: ratio must be in (0,1)");
  const double top = lambda_max(X, scheme, cfg, threads, center);
  std::vector<double> grid(std::size_t(count));
  for (int i = 0; i < count; ++i)
    grid[i] = top * std::pow(ratio, double(i) / double(count - 1));
  return grid;
}

CVResult cross_validate(const SampleMatrix& X, const std::vector<double>& grid, int k,
                        WeightScheme scheme, const SolverConfig& cfg, std::uint64_t seed,
                        int threads, bool center) {
  const int n = X.rows(), p = X.cols();
  if (k < 2 || k > n) throw std::invalid_argument("cross_validate: need 2 <= k <= n");
  if (grid.empty()) throw std::invalid_argument("cross_validate: empty grid");

  // seeded shuffle, folds as contiguous blocks (sizes differing by at most 1)
  std::vector<int> order(std::size_t(n));
  for (int i = 0; i < n; ++i) order[i] = i;
  CounterRng rng(seed, streams::kFolds);
  for (int i = n - 1; i > 0; --i)
    std::swap(order[i], order[std::size_t(rng.uniform_int(std::uint64_t(i) + 1))]);

  std::vector<std::vector<int>> folds(std::size_t(k));
  {
    const int base = n / k, extra = n % k;
    int pos = 0;
    for (int f = 0; f < k; ++f) {
      const int len = base + (f < extra ? 1 : 0);
      folds[f].assign(order.begin() + pos, order.begin() + pos + len);
      pos += len;
    }
  }

  const int K = int(grid.size());
  std::vector<Vector> fold_scores(std::size_t(k), Vector(std::size_t(K), 0.0));

  auto run_fold = [&](int f) {
    const std::vector<int>& val = folds[f];
    std::vector<char> in_val(std::size_t(n), 0);
    for (int i : val) in_val[i] = 1;

    SampleMatrix train(n - int(val.size()), p);
    int t = 0;
    for (int i = 0; i < n; ++i) {
      if (in_val[i]) continue;
      auto src = X.row(i);
      auto dst = train.row(t++);
      std::copy(src.begin(), src.end(), dst.begin());
    }

    Vector means(std::size_t(p), 0.0);
    if (center) {
      for (int j = 0; j < p; ++j) {
        double m = 0.0;
        for (int i = 0; i < train.rows(); ++i) m += train(i, j);
        means[j] = m / train.rows();
      }
    }

    std::vector<FitResult> fits;
    try {
      fits = fit_path(train, grid, scheme, cfg, 1, center);
    } catch (const std::exception& e) {
      throw std::runtime_error("cross_validate: fold " + std::to_string(f + 1) + ": " + e.what());
    }
    for (int j = 0; j < K; ++j)
      fold_scores[f][j] = validation_score(fits[j].L_hat, X, val, means);
  };

  const int workers = std::max(1, std::min(threads <= 0 ? int(std::thread::hardware_concurrency()) : threads, k));
  if (workers <= 1) {
    for (int f = 0; f < k; ++f) run_fold(f);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    auto work = [&] {
      for (;;) {
        const int f = next.fetch_add(1);
        if (f >= k || failed.load()) return;
        try {
          run_fold(f);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(error);
  }

  CVResult out;
  out.lambdas = grid;
  out.mean_score.assign(std::size_t(K), 0.0);
  out.se_score.assign(std::size_t(K), 0.0);
  for (int j = 0; j < K; ++j) {
    double mean = 0.0;
    for (int f = 0; f < k; ++f) mean += fold_scores[f][j];
    mean /= k;
    double var = 0.0;
    for (int f = 0; f < k; ++f) {
      const double d = fold_scores[f][j] - mean;
      var += d * d;
    }
    var /= (k - 1);
    out.mean_score[j] = mean;
    out.se_score[j] = std::sqrt(var / k);
  }

  out.best_idx = 0;
  for (int j = 1; j < K; ++j)
    if (out.mean_score[j] < out.mean_score[out.best_idx]) out.best_idx = j;
  const double cutoff = out.mean_score[out.best_idx] + out.se_score[out.best_idx];
  out.one_se_idx = out.best_idx;
  for (int j = 0; j <= out.best_idx; ++j) {
    if (out.mean_score[j] <= cutoff) {
      out.one_se_idx = j;
      break;
    }
  }
  return out;
}

}  // namespace cholband

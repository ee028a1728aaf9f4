#include "cholband/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "cholband/linalg.hpp"

namespace cholband {

namespace {

constexpr double kSupportTol = 1e-10;

int resolve_threads(int threads, int jobs) {
  if (threads <= 0) threads = int(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  return std::min(threads, std::max(jobs, 1));
}

// Runs fn(r) for rows r = 2..p, largest first, over a worker pool. Each row
// writes only its own output slots, so results do not depend on scheduling.
template <typename Fn>
void for_each_row(int p, int threads, Fn&& fn) {
  std::vector<int> rows;
  rows.reserve(std::size_t(std::max(p - 1, 0)));
  for (int r = p; r >= 2; --r) rows.push_back(r);
  const int workers = resolve_threads(threads, int(rows.size()));

  if (workers <= 1) {
    for (int r : rows) fn(r);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::mutex error_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size() || failed.load()) return;
      try {
        fn(rows[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (failed.load()) std::rethrow_exception(error);
}

int leading_zero_run(std::span<const double> row) {
  int j = 0;
  while (j < int(row.size()) - 1 && row[j] == 0.0) ++j;
  return j;
}

void check_variances(const SymMatrix& S) {
  for (int r = 0; r < S.dim(); ++r)
    if (!(S(r, r) > 0.0))
      throw std::invalid_argument("fit: zero-variance column " + std::to_string(r + 1));
}

}  // namespace

SampleMatrix centered_copy(const SampleMatrix& X) {
  const int n = X.rows(), p = X.cols();
  SampleMatrix C(n, p);
  for (int j = 0; j < p; ++j) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += X(i, j);
    mean /= n;
    for (int i = 0; i < n; ++i) C(i, j) = X(i, j) - mean;
  }
  return C;
}

FitResult fit(const SampleMatrix& X, double lambda, WeightScheme scheme, const SolverConfig& cfg,
              int threads, bool center) {
  if (X.rows() < 2) throw std::invalid_argument("fit: need at least two observations");
  if (lambda < 0.0) throw std::invalid_argument("fit: negative lambda");
  const int p = X.cols();
  const SymMatrix S = center ? gram(centered_copy(X), p) : gram(X, p);
  check_variances(S);

  FitResult out;
  out.L_hat = LowerTriangular(p);
  out.lambda = lambda;
  out.bandwidths.assign(std::size_t(p), 0);
  out.L_hat.row(0)[0] = 1.0 / std::sqrt(S(0, 0));

  std::vector<double> kkt(std::size_t(p), 0.0);
  std::vector<long> iters(std::size_t(p), 0);
  std::vector<char> conv(std::size_t(p), 1);

  for_each_row(p, threads, [&](int r) {
    RowProblem prob{&S, r, lambda, scheme};
    RowSolution sol;
    try {
      sol = solve_row(prob, cfg);
    } catch (const std::exception& e) {
      throw std::runtime_error("fit: row " + std::to_string(r) + ": " + e.what());
    }
    auto dst = out.L_hat.row(r - 1);
    std::copy(sol.row.begin(), sol.row.end(), dst.begin());
    out.bandwidths[r - 1] = (r - 1) - leading_zero_run(sol.row);
    kkt[r - 1] = sol.kkt_residual;
    iters[r - 1] = sol.iterations;
    conv[r - 1] = sol.converged ? 1 : 0;
  });

  out.converged_rows = 1;  // closed-form first row
  for (int r = 2; r <= p; ++r) {
    out.converged_rows += conv[r - 1];
    out.kkt_max = std::max(out.kkt_max, kkt[r - 1]);
    out.total_iterations += iters[r - 1];
  }
  return out;
}

std::vector<FitResult> fit_path(const SampleMatrix& X, const std::vector<double>& grid,
                                WeightScheme scheme, const SolverConfig& cfg, int threads,
                                bool center) {
  if (grid.empty()) throw std::invalid_argument("fit_path: empty grid");
  for (std::size_t k = 0; k + 1 < grid.size(); ++k)
    if (!(grid[k] > grid[k + 1])) throw std::invalid_argument("fit_path: grid must be strictly decreasing");
  if (grid.back() < 0.0) throw std::invalid_argument("fit_path: negative lambda");
  if (X.rows() < 2) throw std::invalid_argument("fit_path: need at least two observations");

  const int p = X.cols();
  const int K = int(grid.size());
  const SymMatrix S = center ? gram(centered_copy(X), p) : gram(X, p);
  check_variances(S);

  std::vector<FitResult> out(std::size_t(K));
  const double l11 = 1.0 / std::sqrt(S(0, 0));
  for (int k = 0; k < K; ++k) {
    out[k].L_hat = LowerTriangular(p);
    out[k].lambda = grid[k];
    out[k].bandwidths.assign(std::size_t(p), 0);
    out[k].L_hat.row(0)[0] = l11;
  }

  std::vector<double> kkt(std::size_t(K) * p, 0.0);
  std::vector<long> iters(std::size_t(K) * p, 0);
  std::vector<char> conv(std::size_t(K) * p, 1);

  for_each_row(p, threads, [&](int r) {
    RowState state;
    for (int k = 0; k < K; ++k) {
      RowProblem prob{&S, r, grid[k], scheme};
      RowSolution sol;
      try {
        sol = solve_row(prob, cfg, &state);
      } catch (const std::exception& e) {
        throw std::runtime_error("fit_path: row " + std::to_string(r) + ": " + e.what());
      }
      auto dst = out[k].L_hat.row(r - 1);
      std::copy(sol.row.begin(), sol.row.end(), dst.begin());
      out[k].bandwidths[r - 1] = (r - 1) - leading_zero_run(sol.row);
      kkt[std::size_t(k) * p + r - 1] = sol.kkt_residual;
      iters[std::size_t(k) * p + r - 1] = sol.iterations;
      conv[std::size_t(k) * p + r - 1] = sol.converged ? 1 : 0;
    }
  });

  for (int k = 0; k < K; ++k) {
    out[k].converged_rows = 1;
    for (int r = 2; r <= p; ++r) {
      out[k].converged_rows += conv[std::size_t(k) * p + r - 1];
      out[k].kkt_max = std::max(out[k].kkt_max, kkt[std::size_t(k) * p + r - 1]);
      out[k].total_iterations += iters[std::size_t(k) * p + r - 1];
    }
  }
  return out;
}

SymMatrix omega(const FitResult& fit) { return tri_matmul_tt(fit.L_hat); }

SupportStats sign_support(const FitResult& fit, const LowerTriangular& L_true) {
  const int p = fit.L_hat.dim();
  if (L_true.dim() != p) throw std::invalid_argument("sign_support: dimension mismatch");

  long tp = 0, fn = 0, tn = 0, fp = 0;
  bool signed_exact = true;
  for (int r = 0; r < p; ++r) {
    auto est = fit.L_hat.row(r);
    auto tru = L_true.row(r);
    for (int j = 0; j < r; ++j) {
      const double e = std::abs(est[j]) < kSupportTol ? 0.0 : est[j];
      const bool est_nz = e != 0.0;
      const bool tru_nz = tru[j] != 0.0;
      if (tru_nz && est_nz) ++tp;
      if (tru_nz && !est_nz) ++fn;
      if (!tru_nz && !est_nz) ++tn;
      if (!tru_nz && est_nz) ++fp;
      const int se = e > 0.0 ? 1 : (e < 0.0 ? -1 : 0);
      const int st = tru[j] > 0.0 ? 1 : (tru[j] < 0.0 ? -1 : 0);
      if (se != st) signed_exact = false;
    }
  }
  SupportStats out;
  out.sensitivity = (tp + fn) == 0 ? 1.0 : double(tp) / double(tp + fn);
  out.specificity = (tn + fp) == 0 ? 1.0 : double(tn) / double(tn + fp);
  out.signed_exact = signed_exact;
  return out;
}

double lambda_max(const SampleMatrix& X, WeightScheme scheme, const SolverConfig& cfg, int threads,
                  bool center) {
  const int p = X.cols();
  const SymMatrix S = center ? gram(centered_copy(X), p) : gram(X, p);
  check_variances(S);

  double scale = 0.0;
  for (int r = 1; r < p; ++r) {
    const double* sr = S.row_ptr(r);
    for (int j = 0; j < r; ++j)
      scale = std::max(scale, 2.0 * std::abs(sr[j]) / std::sqrt(sr[r]));
  }
  if (scale <= 0.0) return 1e-12;  // Gram already diagonal

  auto diagonal_at = [&](double lam) {
    const FitResult f = fit(X, lam, scheme, cfg, threads, center);
    return std::all_of(f.bandwidths.begin(), f.bandwidths.end(), [](int k) { return k == 0; });
  };

  double lam = scale;
  if (diagonal_at(lam)) {
    for (int it = 0; it < 200 && lam > 1e-300; ++it) {
      if (!diagonal_at(lam / 2.0)) return lam;
      lam /= 2.0;
    }
    return lam;
  }
  for (int it = 0; it < 200; ++it) {
    lam *= 2.0;
    if (diagonal_at(lam)) return lam;
  }
  throw std::runtime_error("lambda_max: doubling search did not terminate");
}

}  // namespace cholband

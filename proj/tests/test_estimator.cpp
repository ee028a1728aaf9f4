#include <cmath>
#include <cstring>

#include "doctest.h"
#include "oracles.hpp"

#include "cholband/estimator.hpp"
#include "cholband/linalg.hpp"
#include "cholband/rng.hpp"
#include "cholband/simulate.hpp"

using namespace cholband;

namespace {

SampleMatrix random_sample(int n, int p, CounterRng& rng) {
  SampleMatrix X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
  return X;
}

// rescale columns so the Gram matrix is the identity
SampleMatrix whiten(const SampleMatrix& X) {
  const int n = X.rows(), p = X.cols();
  const SymMatrix S = gram(X, p);
  Vector packed(std::size_t(p) * (p + 1) / 2);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j <= i; ++j) packed[std::size_t(i) * (i + 1) / 2 + j] = S(i, j);
  REQUIRE(cholesky_packed(packed, p));
  const LowerTriangular C(p, packed);
  SampleMatrix W(n, p);
  Vector x(std::size_t(p));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x[std::size_t(j)] = X(i, j);
    const Vector y = tri_solve(C, {x.data(), x.size()});
    for (int j = 0; j < p; ++j) W(i, j) = y[std::size_t(j)];
  }
  return W;
}

}  // namespace

TEST_CASE("fit: whitened data with lambda = 0 recovers the identity") {
  CounterRng rng(301, 0);
  const SampleMatrix W = whiten(random_sample(40, 5, rng));
  const FitResult f = fit(W, 0.0, WeightScheme::Quadratic, SolverConfig{});
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c <= r; ++c)
      CHECK(std::abs(f.L_hat(r, c) - (r == c ? 1.0 : 0.0)) <= 1e-6);
}

TEST_CASE("fit: at lambda_max the estimate is diagonal with 1/sqrt(S_rr)") {
  CounterRng rng(307, 1);
  const SampleMatrix X = random_sample(30, 6, rng);
  const SymMatrix S = gram(X, 6);
  for (WeightScheme s : {WeightScheme::Quadratic, WeightScheme::Unit}) {
    const double lmax = lambda_max(X, s, SolverConfig{});
    const FitResult f = fit(X, lmax, s, SolverConfig{});
    for (int r = 0; r < 6; ++r) {
      CHECK(f.bandwidths[std::size_t(r)] == 0);
      CHECK(f.L_hat(r, r) == doctest::Approx(1.0 / std::sqrt(S(r, r))).epsilon(1e-5));
    }
    // threshold behavior persists above lambda_max
    const FitResult g = fit(X, 2.0 * lmax, s, SolverConfig{});
    for (int r = 0; r < 6; ++r) CHECK(g.bandwidths[std::size_t(r)] == 0);
  }
}

TEST_CASE("fit: p = 1 closed form") {
  SampleMatrix X(2, 1);
  X(0, 0) = 1.0;
  X(1, 0) = -1.0;
  const FitResult f = fit(X, 0.3, WeightScheme::Unit, SolverConfig{});
  CHECK(f.L_hat(0, 0) == doctest::Approx(1.0));  // S_11 = 1
}

TEST_CASE("fit: zero-variance column is rejected with its index") {
  SampleMatrix X(4, 3);
  CounterRng rng(311, 2);
  for (int i = 0; i < 4; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = 0.0;
    X(i, 2) = rng.normal();
  }
  CHECK_THROWS_WITH_AS(fit(X, 0.1, WeightScheme::Unit, SolverConfig{}),
                       doctest::Contains("column 2"), std::invalid_argument);
}

TEST_CASE("decoupling: parallel fit equals sequential per-row solves bitwise") {
  CounterRng rng(313, 3);
  const SampleMatrix X = random_sample(40, 12, rng);
  const double lambda = 0.15;
  const FitResult par = fit(X, lambda, WeightScheme::Quadratic, SolverConfig{}, 4);

  const SymMatrix S = gram(X, 12);
  LowerTriangular L(12);
  L.row(0)[0] = 1.0 / std::sqrt(S(0, 0));
  for (int r = 2; r <= 12; ++r) {
    const RowSolution sol = solve_row({&S, r, lambda, WeightScheme::Quadratic}, SolverConfig{});
    auto dst = L.row(r - 1);
    std::copy(sol.row.begin(), sol.row.end(), dst.begin());
  }
  REQUIRE(par.L_hat.packed().size() == L.packed().size());
  CHECK(std::memcmp(par.L_hat.packed().data(), L.packed().data(),
                    L.packed().size() * sizeof(double)) == 0);
}

TEST_CASE("fit: thread count does not change the result bitwise") {
  CounterRng rng(317, 4);
  const SampleMatrix X = random_sample(35, 10, rng);
  const FitResult f1 = fit(X, 0.2, WeightScheme::Unit, SolverConfig{}, 1);
  const FitResult f4 = fit(X, 0.2, WeightScheme::Unit, SolverConfig{}, 4);
  CHECK(std::memcmp(f1.L_hat.packed().data(), f4.L_hat.packed().data(),
                    f1.L_hat.packed().size() * sizeof(double)) == 0);
}

TEST_CASE("omega: diagonal and banded algebra") {
  LowerTriangular D(3);
  D.row(0)[0] = 2.0;
  D.row(1)[1] = 3.0;
  D.row(2)[2] = 0.5;
  FitResult f;
  f.L_hat = D;
  const SymMatrix O = omega(f);
  CHECK(O(0, 0) == doctest::Approx(4.0));
  CHECK(O(1, 1) == doctest::Approx(9.0));
  CHECK(O(2, 2) == doctest::Approx(0.25));
  CHECK(O(0, 1) == 0.0);

  // strictly banded K = 1 gives bandwidth at most 2 in Omega
  const int p = 6;
  LowerTriangular B(p);
  for (int r = 0; r < p; ++r) {
    B.row(r)[r] = 1.0;
    if (r > 0) B.row(r)[r - 1] = 0.7;
  }
  FitResult fb;
  fb.L_hat = B;
  const SymMatrix Ob = omega(fb);
  for (int j = 0; j < p; ++j)
    for (int k = j + 3; k < p; ++k) CHECK(Ob(j, k) == 0.0);
}

TEST_CASE("omega: zero pattern obeys the column-tail implication") {
  const GroundTruth t = make_truth({Model::M2, 10, 0, 99});
  FitResult f;
  f.L_hat = t.L;
  const SymMatrix O = omega(f);
  for (int j = 0; j < 10; ++j) {
    for (int k = j + 1; k < 10; ++k) {
      bool tail_zero = true;
      for (int r = k; r < 10; ++r)
        if (t.L(r, j) != 0.0) tail_zero = false;
      if (tail_zero) CHECK(O(j, k) == 0.0);
    }
  }
}

TEST_CASE("omega: positive definite on fits") {
  CounterRng rng(331, 5);
  const SampleMatrix X = random_sample(30, 8, rng);
  for (double lambda : {0.0, 0.05, 0.3, 2.0}) {
    const FitResult f = fit(X, lambda, WeightScheme::Quadratic, SolverConfig{});
    CHECK(oracle::min_eigenvalue(omega(f)) > 0.0);
  }
}

TEST_CASE("sign_support: exact recovery, diagonal estimate, hand enumeration") {
  const GroundTruth t = make_truth({Model::M2, 10, 0, 5});
  FitResult exact;
  exact.L_hat = t.L;
  const SupportStats s1 = sign_support(exact, t.L);
  CHECK(s1.sensitivity == 1.0);
  CHECK(s1.specificity == 1.0);
  CHECK(s1.signed_exact);

  // count strictly-lower nonzeros of the truth
  long nnz = 0;
  for (int r = 0; r < 10; ++r)
    for (int j = 0; j < r; ++j)
      if (t.L(r, j) != 0.0) ++nnz;
  REQUIRE(nnz > 0);

  FitResult diag;
  diag.L_hat = LowerTriangular(10);
  const SupportStats s2 = sign_support(diag, t.L);
  CHECK(s2.sensitivity == 0.0);
  CHECK(s2.specificity == 1.0);
  CHECK(!s2.signed_exact);

  // flip two entries: one true nonzero zeroed, one true zero activated
  LowerTriangular perturbed = t.L;
  int rz = -1, cz = -1, ra = -1, ca = -1;
  for (int r = 0; r < 10 && rz < 0; ++r)
    for (int j = 0; j < r && rz < 0; ++j)
      if (perturbed(r, j) != 0.0) {
        rz = r;
        cz = j;
      }
  for (int r = 9; r >= 0 && ra < 0; --r)
    for (int j = 0; j < r && ra < 0; ++j)
      if (perturbed(r, j) == 0.0) {
        ra = r;
        ca = j;
      }
  perturbed.row(rz)[cz] = 0.0;
  perturbed.row(ra)[ca] = 0.2;
  FitResult fp;
  fp.L_hat = perturbed;
  const SupportStats s3 = sign_support(fp, t.L);
  const long zeros = 45 - nnz;  // strictly-lower positions of a 10x10 matrix
  CHECK(s3.sensitivity == doctest::Approx(double(nnz - 1) / double(nnz)));
  CHECK(s3.specificity == doctest::Approx(double(zeros - 1) / double(zeros)));
  CHECK(!s3.signed_exact);

  CHECK_THROWS_AS(sign_support(fp, LowerTriangular(4)), std::invalid_argument);
}

TEST_CASE("fit_path: warm-started path matches per-lambda cold fits to tolerance") {
  CounterRng rng(337, 6);
  const SampleMatrix X = random_sample(40, 8, rng);
  const std::vector<double> grid{1.0, 0.5, 0.25, 0.1, 0.05};
  const auto path = fit_path(X, grid, WeightScheme::Quadratic, SolverConfig{});
  REQUIRE(path.size() == grid.size());
  const SymMatrix S = gram(X, 8);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const FitResult cold = fit(X, grid[k], WeightScheme::Quadratic, SolverConfig{});
    for (int r = 2; r <= 8; ++r) {
      Vector warm_row(path[k].L_hat.row(r - 1).begin(), path[k].L_hat.row(r - 1).end());
      Vector cold_row(cold.L_hat.row(r - 1).begin(), cold.L_hat.row(r - 1).end());
      const double fw = oracle::row_objective(warm_row, S, r, grid[k], WeightScheme::Quadratic);
      const double fc = oracle::row_objective(cold_row, S, r, grid[k], WeightScheme::Quadratic);
      CHECK(std::abs(fw - fc) <= 1e-5);
    }
  }
}

#pragma once

#include <span>

#include "cholband/types.hpp"

namespace cholband {

struct MatrixNorms {
  double frobenius;
  double elementwise_inf;
  double induced_inf;
  double spectral;
};

/// Dense square matrix, row-major. Scratch type for differences and norm input.
class DenseMatrix {
 public:
  explicit DenseMatrix(int p) : p_(p), a_(std::size_t(p) * p, 0.0) {}
  int dim() const { return p_; }
  double operator()(int i, int j) const { return a_[std::size_t(i) * p_ + j]; }
  double& operator()(int i, int j) { return a_[std::size_t(i) * p_ + j]; }
  const double* data() const { return a_.data(); }

 private:
  int p_;
  Vector a_;
};

DenseMatrix to_dense(const LowerTriangular& L);
DenseMatrix to_dense(const SymMatrix& A);
DenseMatrix subtract(const DenseMatrix& A, const DenseMatrix& B);

/// (1/n) X_{1:r}^T X_{1:r} for the leading r columns.
SymMatrix gram(const SampleMatrix& X, int r);

/// L^T L (symmetric positive definite for valid L).
SymMatrix tri_matmul_tt(const LowerTriangular& L);

/// Forward substitution: returns y with L y = b.
Vector tri_solve(const LowerTriangular& L, std::span<const double> b);

/// Frobenius / max-abs / induced-infinity / spectral norms.
/// Spectral norm by power iteration on A^T A with a fixed start vector,
/// relative tolerance 1e-10; throws after 10,000 iterations.
MatrixNorms matrix_norms(const DenseMatrix& A);

/// Scaled Gaussian KL loss between Omega = L_true^T L_true and omega_hat:
/// (1/p)[tr(Sigma omega_hat) - log det omega_hat + log det Omega - p].
/// Throws if omega_hat is not positive definite.
double kl_loss(const LowerTriangular& L_true, const SymMatrix& omega_hat);

// Packed lower-triangular Cholesky utilities (row-major packed storage, as
// in LowerTriangular). Used by kl_loss and the row solver's cached factor.

/// In-place Cholesky of a packed symmetric matrix given by its lower triangle.
/// Returns false if the matrix is not positive definite.
bool cholesky_packed(Vector& a, int m);

/// Solve G x = b (forward) for packed lower-triangular G; x starts as b.
void solve_packed_lower(const Vector& g, int m, std::span<double> x);

/// Solve G^T x = b (backward) for packed lower-triangular G; x starts as b.
void solve_packed_lower_t(const Vector& g, int m, std::span<double> x);

}  // namespace cholband

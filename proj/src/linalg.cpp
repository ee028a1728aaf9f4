#include "cholband/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace cholband {

DenseMatrix to_dense(const LowerTriangular& L) {
  const int p = L.dim();
  DenseMatrix A(p);
  for (int r = 0; r < p; ++r) {
    auto row = L.row(r);
    for (int c = 0; c <= r; ++c) A(r, c) = row[c];
  }
  return A;
}

DenseMatrix to_dense(const SymMatrix& S) {
  const int p = S.dim();
  DenseMatrix A(p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) A(i, j) = S(i, j);
  return A;
}

DenseMatrix subtract(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.dim() != B.dim()) throw std::invalid_argument("subtract: dimension mismatch");
  const int p = A.dim();
  DenseMatrix C(p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) C(i, j) = A(i, j) - B(i, j);
  return C;
}

SymMatrix gram(const SampleMatrix& X, int r) {
  if (r < 1 || r > X.cols()) throw std::invalid_argument("gram: column count out of range");
  const int n = X.rows();
  SymMatrix S(r);
  for (int j = 0; j < r; ++j) {
    for (int k = j; k < r; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += X(i, j) * X(i, k);
      S.set(j, k, s / n);
    }
  }
  return S;
}

SymMatrix tri_matmul_tt(const LowerTriangular& L) {
  const int p = L.dim();
  SymMatrix O(p);
  // (L^T L)_{jk} = sum_{r >= max(j,k)} L_{rj} L_{rk}
  for (int j = 0; j < p; ++j) {
    for (int k = j; k < p; ++k) {
      double s = 0.0;
      for (int r = k; r < p; ++r) {
        auto row = L.row(r);
        s += row[j] * row[k];
      }
      O.set(j, k, s);
    }
  }
  return O;
}

Vector tri_solve(const LowerTriangular& L, std::span<const double> b) {
  const int p = L.dim();
  if (int(b.size()) != p) throw std::invalid_argument("tri_solve: length mismatch");
  Vector y(b.begin(), b.end());
  for (int r = 0; r < p; ++r) {
    auto row = L.row(r);
    double s = y[r];
    for (int c = 0; c < r; ++c) s -= row[c] * y[c];
    y[r] = s / row[r];
  }
  return y;
}

namespace {

// Deterministic start vector for the power iteration (SplitMix64 finalizer
// over the index; no runtime seeding so results are test-stable).
double mix_to_unit(std::uint64_t i) {
  std::uint64_t z = i + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return double(z >> 11) * 0x1.0p-53 - 0.5;
}

double spectral_norm(const DenseMatrix& A) {
  const int p = A.dim();
  Vector v(p), w(p), z(p);
  for (int i = 0; i < p; ++i) v[i] = mix_to_unit(std::uint64_t(i));
  double nrm = 0.0;
  for (double x : v) nrm += x * x;
  nrm = std::sqrt(nrm);
  for (double& x : v) x /= nrm;

  double sigma = 0.0;
  const int max_iter = 10000;
  for (int it = 0; it < max_iter; ++it) {
    // w = A v, z = A^T w
    for (int i = 0; i < p; ++i) {
      double s = 0.0;
      for (int j = 0; j < p; ++j) s += A(i, j) * v[j];
      w[i] = s;
    }
    double wn = 0.0;
    for (double x : w) wn += x * x;
    double s_new = std::sqrt(wn);  // ||Av|| with ||v|| = 1
    if (s_new == 0.0) return 0.0;
    for (int j = 0; j < p; ++j) {
      double s = 0.0;
      for (int i = 0; i < p; ++i) s += A(i, j) * w[i];
      z[j] = s;
    }
    double zn = 0.0;
    for (double x : z) zn += x * x;
    zn = std::sqrt(zn);
    if (zn == 0.0) return s_new;
    for (int j = 0; j < p; ++j) v[j] = z[j] / zn;
    if (std::abs(s_new - sigma) <= 1e-10 * std::max(s_new, 1e-300)) return s_new;
    sigma = s_new;
  }
  throw std::runtime_error("matrix_norms: power iteration did not converge in 10000 iterations");
}

}  // namespace

MatrixNorms matrix_norms(const DenseMatrix& A) {
  const int p = A.dim();
  MatrixNorms out{0.0, 0.0, 0.0, 0.0};
  double fro = 0.0;
  for (int i = 0; i < p; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < p; ++j) {
      const double a = A(i, j);
      if (!std::isfinite(a)) throw std::invalid_argument("matrix_norms: non-finite entry");
      fro += a * a;
      rowsum += std::abs(a);
      out.elementwise_inf = std::max(out.elementwise_inf, std::abs(a));
    }
    out.induced_inf = std::max(out.induced_inf, rowsum);
  }
  out.frobenius = std::sqrt(fro);
  out.spectral = spectral_norm(A);
  return out;
}

bool cholesky_packed(Vector& a, int m) {
  for (int i = 0; i < m; ++i) {
    double* ri = a.data() + std::size_t(i) * (i + 1) / 2;
    for (int j = 0; j < i; ++j) {
      const double* rj = a.data() + std::size_t(j) * (j + 1) / 2;
      double s = ri[j];
      for (int k = 0; k < j; ++k) s -= ri[k] * rj[k];
      ri[j] = s / rj[j];
    }
    double s = ri[i];
    for (int k = 0; k < i; ++k) s -= ri[k] * ri[k];
    if (!(s > 0.0)) return false;
    ri[i] = std::sqrt(s);
  }
  return true;
}

void solve_packed_lower(const Vector& g, int m, std::span<double> x) {
  for (int i = 0; i < m; ++i) {
    const double* ri = g.data() + std::size_t(i) * (i + 1) / 2;
    double s = x[i];
    for (int k = 0; k < i; ++k) s -= ri[k] * x[k];
    x[i] = s / ri[i];
  }
}

void solve_packed_lower_t(const Vector& g, int m, std::span<double> x) {
  for (int i = m - 1; i >= 0; --i) {
    const double* ri = g.data() + std::size_t(i) * (i + 1) / 2;
    double s = x[i];
    for (int k = i + 1; k < m; ++k) {
      const double* rk = g.data() + std::size_t(k) * (k + 1) / 2;
      s -= rk[i] * x[k];
    }
    x[i] = s / ri[i];
  }
}

double kl_loss(const LowerTriangular& L_true, const SymMatrix& omega_hat) {
  const int p = L_true.dim();
  if (omega_hat.dim() != p) throw std::invalid_argument("kl_loss: dimension mismatch");

  // log det(omega_hat) via dense Cholesky; failure means not PD.
  Vector packed(std::size_t(p) * (p + 1) / 2);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j <= i; ++j) packed[std::size_t(i) * (i + 1) / 2 + j] = omega_hat(i, j);
  if (!cholesky_packed(packed, p))
    throw std::invalid_argument("kl_loss: omega_hat is not positive definite");
  double logdet_hat = 0.0;
  for (int i = 0; i < p; ++i) logdet_hat += 2.0 * std::log(packed[std::size_t(i) * (i + 1) / 2 + i]);

  // tr(Sigma omega_hat) with Sigma = L^{-1} L^{-T}: columns y_j = L^{-1} e_j.
  double trace = 0.0;
  Vector e(p, 0.0);
  for (int j = 0; j < p; ++j) {
    e.assign(p, 0.0);
    e[j] = 1.0;
    Vector y = tri_solve(L_true, e);
    double q = 0.0;
    for (int a = 0; a < p; ++a) {
      double s = 0.0;
      const double* row = omega_hat.row_ptr(a);
      for (int b = 0; b < p; ++b) s += row[b] * y[b];
      q += y[a] * s;
    }
    trace += q;
  }

  double logdet_true = 0.0;
  for (int r = 0; r < p; ++r) logdet_true += 2.0 * std::log(L_true(r, r));

  return (trace - logdet_hat + logdet_true - p) / p;
}

}  // namespace cholband

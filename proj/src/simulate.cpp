#include "cholband/simulate.hpp"

#include <cmath>

#include "cholband/linalg.hpp"
#include "cholband/rng.hpp"

namespace cholband {

namespace {

void check_divisibility(const SimulationSpec& spec) {
  if (spec.p < 1) throw std::invalid_argument("make_truth: p must be positive");
  switch (spec.model) {
    case Model::M1:
      break;
    case Model::M2:
      if (spec.p % 5 != 0) throw std::invalid_argument("make_truth: model 2 needs p divisible by 5");
      break;
    case Model::M3:
      if (spec.p % 2 != 0) throw std::invalid_argument("make_truth: model 3 needs p divisible by 2");
      break;
    case Model::M4:
      if (spec.p % 4 != 0) throw std::invalid_argument("make_truth: model 4 needs p divisible by 4");
      break;
  }
}

// Per-row bandwidths of the block models: within each block, a row is given
// a nonzero bandwidth with probability 1/2, drawn uniformly from
// {1, ..., within-block predecessors}; the first row of a block is always 0.
std::vector<int> block_bandwidths(int p, int blocks, CounterRng& structure) {
  const int bs = p / blocks;
  std::vector<int> K(std::size_t(p), 0);
  for (int r = 1; r <= p; ++r) {
    const int within = (r - 1) % bs + 1;  // 1-based row index inside its block
    if (within == 1) continue;
    const bool nonzero = structure.next_unit() < 0.5;
    if (!nonzero) continue;
    K[r - 1] = 1 + int(structure.uniform_int(std::uint64_t(within - 1)));
  }
  return K;
}

}  // namespace

GroundTruth make_truth(const SimulationSpec& spec, bool unit_scale) {
  check_divisibility(spec);
  const int p = spec.p;

  CounterRng diag_rng(spec.seed, streams::kDiagonal);
  CounterRng structure(spec.seed, streams::kStructure);
  CounterRng values(spec.seed, streams::kValues);

  Vector d(std::size_t(p));
  for (int r = 0; r < p; ++r) d[r] = unit_scale ? 1.0 : diag_rng.uniform(2.0, 5.0);

  std::vector<int> K(std::size_t(p), 0);
  double vlo = 0.1, vhi = 0.4;
  switch (spec.model) {
    case Model::M1:
      for (int r = 2; r <= p; ++r) K[r - 1] = 1;
      break;
    case Model::M2:
      K = block_bandwidths(p, 5, structure);
      break;
    case Model::M3:
      K = block_bandwidths(p, 2, structure);
      break;
    case Model::M4: {
      const int lo = p / 4, hi = 3 * p / 4;  // 1-based row range of the dense block
      for (int r = lo; r <= hi; ++r) K[r - 1] = r - lo;
      vlo = 0.1;
      vhi = 0.2;
      break;
    }
  }

  LowerTriangular L(p);
  for (int r = 1; r <= p; ++r) {
    auto row = L.row(r - 1);
    for (int j = 0; j < r; ++j) row[j] = 0.0;
    row[r - 1] = 1.0 / d[r - 1];
    for (int j = r - 1 - K[r - 1]; j < r - 1; ++j) {
      double t;
      if (spec.model == Model::M1) {
        t = 0.8;
      } else {
        t = values.uniform(vlo, vhi);
        if (values.next_unit() < 0.5) t = -t;
      }
      row[j] = t / d[r - 1];
    }
  }
  L.validate();
  return {std::move(L), std::move(K)};
}

SampleMatrix sample_gaussian(const LowerTriangular& L, int n, std::uint64_t seed) {
  const int p = L.dim();
  if (n < 1) throw std::invalid_argument("sample_gaussian: n must be positive");
  CounterRng noise(seed, streams::kNoise);
  SampleMatrix X(n, p);
  Vector z(std::size_t(p));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) z[j] = noise.normal();
    Vector x = tri_solve(L, {z.data(), z.size()});
    auto dst = X.row(i);
    std::copy(x.begin(), x.end(), dst.begin());
  }
  return X;
}

ErrorReport error_report(const LowerTriangular& L_hat, const LowerTriangular& L_true,
                         const SymMatrix& omega_hat) {
  const int p = L_hat.dim();
  if (L_true.dim() != p || omega_hat.dim() != p)
    throw std::invalid_argument("error_report: dimension mismatch");
  const DenseMatrix diff = subtract(to_dense(L_hat), to_dense(L_true));
  const MatrixNorms nm = matrix_norms(diff);
  ErrorReport out;
  out.scaled_frob = nm.frobenius * nm.frobenius / p;
  out.mat_inf = nm.induced_inf;
  out.spectral = nm.spectral;
  out.kl = kl_loss(L_true, omega_hat);
  return out;
}

std::vector<RocPoint> roc_curve(const SampleMatrix& X, const LowerTriangular& L_true,
                                const std::vector<double>& grid, WeightScheme scheme,
                                const SolverConfig& cfg, int threads) {
  if (grid.empty()) throw std::invalid_argument("roc_curve: empty grid");
  const std::vector<FitResult> fits = fit_path(X, grid, scheme, cfg, threads);
  std::vector<RocPoint> out;
  out.reserve(fits.size());
  for (const FitResult& f : fits) {
    const SupportStats s = sign_support(f, L_true);
    out.push_back({f.lambda, s.sensitivity, s.specificity});
  }
  return out;
}

}  // namespace cholband

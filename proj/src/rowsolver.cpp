#include "cholband/rowsolver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "cholband/linalg.hpp"

namespace cholband {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

constexpr double kSupportTol = 1e-10;

}  // namespace

BetaCache::BetaCache(const SymMatrix& S, int r) : S_(&S), r_(r) {
  if (r < 2 || r > S.dim()) throw std::invalid_argument("BetaCache: row index out of range");
  const int m = r - 1;
  chol_.resize(std::size_t(m) * (m + 1) / 2);
  t1_.resize(std::size_t(m));
}

void BetaCache::refresh(double rho) {
  const int m = r_ - 1;
  for (int i = 0; i < m; ++i) {
    const double* si = S_->row_ptr(i);
    double* row = chol_.data() + std::size_t(i) * (i + 1) / 2;
    for (int j = 0; j < i; ++j) row[j] = 2.0 * si[j];
    row[i] = 2.0 * si[i] + rho;
  }
  if (!cholesky_packed(chol_, m))
    throw RowSolverError("beta_update: 2 S_{-r,-r} + rho I is not positive definite");

  const double* sr = S_->row_ptr(r_ - 1);
  for (int j = 0; j < m; ++j) t1_[j] = sr[j];
  solve_packed_lower(chol_, m, {t1_.data(), std::size_t(m)});
  solve_packed_lower_t(chol_, m, {t1_.data(), std::size_t(m)});

  double quad = 0.0;
  for (int j = 0; j < m; ++j) quad += sr[j] * t1_[j];
  a_ = 4.0 * quad - 2.0 * sr[r_ - 1] - rho;
  rho_ = rho;
}

void BetaCache::solve_in_place(std::span<double> x) const {
  const int m = r_ - 1;
  solve_packed_lower(chol_, m, x);
  solve_packed_lower_t(chol_, m, x);
}

Vector beta_update(const RowState& state, const RowProblem& prob, BetaCache& cache) {
  const int r = prob.r;
  const int m = r - 1;
  const double rho = state.rho;
  if (cache.rho() != rho) cache.refresh(rho);

  const double A = cache.a_coef();
  if (A >= 0.0) throw RowSolverError("beta_update: A >= 0, input Gram is corrupted");

  // v = u_unscaled_{-r} - rho gamma_{-r}, with u_unscaled = rho * u
  Vector t2(std::size_t(m));
  for (int j = 0; j < m; ++j) t2[j] = rho * (state.u[j] - state.gamma[j]);
  cache.solve_in_place({t2.data(), std::size_t(m)});

  const double* sr = prob.S->row_ptr(r - 1);
  double dot = 0.0;
  for (int j = 0; j < m; ++j) dot += sr[j] * t2[j];
  const double B = 2.0 * dot - rho * state.u[r - 1] + rho * state.gamma[r - 1];

  const double disc = std::sqrt(B * B - 8.0 * A);
  // positive root of A b^2 + B b + 2 = 0, in the cancellation-free form
  const double beta_r = (B > 0.0) ? -(B + disc) / (2.0 * A) : 4.0 / (disc - B);
  assert(beta_r > 0.0);

  Vector beta(std::size_t(r));
  const Vector& t1 = cache.t1();
  for (int j = 0; j < m; ++j) beta[j] = -(2.0 * beta_r * t1[j] + t2[j]);
  beta[r - 1] = beta_r;
  return beta;
}

void rho_update(RowState& state) {
  if (state.primal_res > 10.0 * state.dual_res) {
    state.rho *= 2.0;
    for (double& x : state.u) x *= 0.5;
  } else if (state.dual_res > 10.0 * state.primal_res) {
    state.rho *= 0.5;
    for (double& x : state.u) x *= 2.0;
  }
}

RowSolution solve_row(const RowProblem& prob, const SolverConfig& cfg, RowState* state) {
  const int r = prob.r;
  if (prob.S == nullptr || r < 2 || r > prob.S->dim())
    throw std::invalid_argument("solve_row: invalid row problem");
  if (prob.lambda < 0.0) throw std::invalid_argument("solve_row: negative lambda");

  RowState local;
  RowState& st = state ? *state : local;
  const bool resume = int(st.beta.size()) == r && st.rho > 0.0;
  if (!resume) {
    st.beta.assign(std::size_t(r), 0.0);
    st.gamma.assign(std::size_t(r), 0.0);
    st.u.assign(std::size_t(r), 0.0);
    st.beta[r - 1] = 1.0;
    st.gamma[r - 1] = 1.0;
    st.rho = cfg.rho_init;
    st.iter = 0;
    st.prox_warm = DualBlocks(r);
  }
  if (!st.cache) st.cache = std::make_unique<BetaCache>(*prob.S, r);

  const double sqrt_r = std::sqrt(double(r));
  Vector y(std::size_t(r));
  bool converged = false;
  int iters = 0;

  for (int t = 1; t <= cfg.max_iter; ++t) {
    iters = t;
    st.beta = beta_update(st, prob, *st.cache);
    for (int j = 0; j < r; ++j) y[j] = st.beta[j] + st.u[j];

    Vector gamma_new;
    if (prob.lambda > 0.0) {
      const double tau = prob.lambda / st.rho;
      if (prob.scheme == WeightScheme::Unit) {
        gamma_new = prox_unit({y.data(), y.size()}, tau).gamma;
      } else {
        gamma_new = prox_general({y.data(), y.size()}, tau, prob.scheme, &st.prox_warm).gamma;
      }
    } else {
      gamma_new = y;
    }

    double pr = 0.0, dr = 0.0;
    for (int j = 0; j < r; ++j) {
      const double d = st.beta[j] - gamma_new[j];
      st.u[j] += d;
      pr += d * d;
      const double g = gamma_new[j] - st.gamma[j];
      dr += g * g;
    }
    st.primal_res = std::sqrt(pr);
    st.dual_res = st.rho * std::sqrt(dr);
    st.gamma = std::move(gamma_new);
    st.iter += 1;

    const double eps_pri =
        cfg.eps_abs * sqrt_r + cfg.eps_rel * std::max(norm2(st.beta), norm2(st.gamma));
    const double eps_dual = cfg.eps_abs * sqrt_r + cfg.eps_rel * st.rho * norm2(st.u);
    if (st.primal_res <= eps_pri && st.dual_res <= eps_dual) {
      converged = true;
      break;
    }
    if (cfg.rho_check_period > 0 && t % cfg.rho_check_period == 0) rho_update(st);
  }

  // Optimality residual at the returned iterate: the gamma-update guarantees
  // rho(y - gamma) = rho u equals the penalty subgradient term, so the
  // stationarity gap is -2/gamma_r e_r + 2 S gamma + rho u.
  RowSolution sol;
  sol.iterations = iters;
  sol.converged = converged;
  double kkt = 0.0;
  for (int i = 0; i < r; ++i) {
    const double* si = prob.S->row_ptr(i);
    double g = 0.0;
    for (int j = 0; j < r; ++j) g += 2.0 * si[j] * st.gamma[j];
    g += st.rho * st.u[i];
    if (i == r - 1) g -= 2.0 / st.gamma[r - 1];
    kkt = std::max(kkt, std::abs(g));
  }
  sol.kkt_residual = kkt;

  sol.row = st.gamma;
  for (int j = 0; j < r - 1 && std::abs(sol.row[j]) < kSupportTol; ++j) sol.row[j] = 0.0;
  if (!(sol.row[r - 1] > 0.0))
    throw RowSolverError("solve_row: non-positive diagonal iterate in row " + std::to_string(r));
  return sol;
}

}  // namespace cholband

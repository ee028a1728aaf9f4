#pragma once

#include <span>

#include "cholband/types.hpp"

namespace cholband {

enum class WeightScheme { Quadratic, Unit };

/// Group weights for one row of length r: group l (0-based, covering
/// coordinates 0..l) weights coordinate m by w(l, m). Quadratic weights
/// decay as 1/(l-m+1)^2 and depend only on the offset, so the table is a
/// single decay vector built once per (r, scheme) and reused across all
/// solver iterations for that row.
class Weights {
 public:
  Weights(int r, WeightScheme scheme);

  double operator()(int l, int m) const {
    return scheme_ == WeightScheme::Unit ? 1.0 : decay_[l - m];
  }

  WeightScheme scheme() const { return scheme_; }
  int r() const { return r_; }

 private:
  WeightScheme scheme_;
  int r_;
  Vector decay_;
};

/// Dual blocks of the hierarchical group-lasso prox: block l has l+1
/// entries, packed contiguously. Doubles as the warm start carried across
/// solver iterations.
class DualBlocks {
 public:
  explicit DualBlocks(int r)
      : r_(r), data_(r >= 2 ? std::size_t(r) * (r - 1) / 2 : 0, 0.0) {}

  int r() const { return r_; }
  std::span<double> block(int l) { return {data_.data() + std::size_t(l) * (l + 1) / 2, std::size_t(l) + 1}; }
  std::span<const double> block(int l) const {
    return {data_.data() + std::size_t(l) * (l + 1) / 2, std::size_t(l) + 1};
  }
  void reset() { data_.assign(data_.size(), 0.0); }

 private:
  int r_;
  Vector data_;
};

struct ProxResult {
  Vector gamma;     // length r; coordinate r-1 (the diagonal) is never shrunk
  Vector nu;        // length r-1; group multipliers [nu_l]_+ at the solution
  int zero_prefix;  // J: gamma[0..J-1] are exactly zero
};

/// Signals numerical breakdown inside the prox (root bracketing or
/// coordinate descent failure); callers abort the enclosing fit.
class ProxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hierarchical group-lasso penalty of one row:
/// sum_{l=1}^{r-1} sqrt(sum_{m<=l} w_{lm}^2 row_m^2); zero for r = 1.
double penalty_value(std::span<const double> row, WeightScheme scheme);

/// Prox for unit weights: sequential group soft-thresholding of prefixes,
/// minimizing 0.5||g - y||^2 + tau * sum_l ||g_{1:l}||_2 exactly.
ProxResult prox_unit(std::span<const double> y, double tau);

/// Prox for either scheme via blockwise coordinate descent on the dual:
/// each block update is an elliptical projection solved by a safeguarded
/// Newton root-find. Passes repeat until the blocks reach a fixed point
/// (unit weights settle after one pass; decaying weights need more).
/// `warm`, when given, supplies starting blocks and receives the final ones.
ProxResult prox_general(std::span<const double> y, double tau, WeightScheme scheme,
                        DualBlocks* warm = nullptr);

/// Root nu of h(nu) = sum_m w_m^2 z_m^2 / (w_m^2 + nu)^2 = tau^2, solved as
/// 1/h(nu) = tau^-2 by Newton with a bisection safeguard on the bracket
/// [max(0, ||Dz||/tau - max(w)^2), ||Dz||/tau]. Requires ||D^{-1}z|| > tau.
double newton_root(std::span<const double> z, std::span<const double> w, double tau);

/// Tapering form of the prox: one forward pass collects the roots nu_l,
/// then gamma = y * g with g_m = prod_{l=m}^{r-1} [nu_l]_+/(w_{lm}^2 + [nu_l]_+).
Vector taper_formula(std::span<const double> y, double tau, WeightScheme scheme);

}  // namespace cholband

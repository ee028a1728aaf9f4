#include "cholband/penalty.hpp"

#include <algorithm>
#include <cmath>

namespace cholband {

Weights::Weights(int r, WeightScheme scheme) : scheme_(scheme), r_(r) {
  if (r < 1) throw std::invalid_argument("Weights: row length must be positive");
  if (scheme_ == WeightScheme::Quadratic) {
    decay_.resize(std::size_t(std::max(r - 1, 1)));
    for (int d = 0; d < int(decay_.size()); ++d) decay_[d] = 1.0 / double((d + 1) * (d + 1));
  }
}

double penalty_value(std::span<const double> row, WeightScheme scheme) {
  const int r = int(row.size());
  if (r < 1) throw std::invalid_argument("penalty_value: empty row");
  if (r == 1) return 0.0;
  Weights w(r, scheme);
  double total = 0.0;
  for (int l = 0; l < r - 1; ++l) {
    double q = 0.0;
    for (int m = 0; m <= l; ++m) {
      const double t = w(l, m) * row[m];
      q += t * t;
    }
    total += std::sqrt(q);
  }
  return total;
}

double newton_root(std::span<const double> z, std::span<const double> w, double tau) {
  const int n = int(z.size());
  const double tau2 = tau * tau;

  double dz2 = 0.0, wmax = 0.0;
  for (int m = 0; m < n; ++m) {
    dz2 += w[m] * w[m] * z[m] * z[m];
    wmax = std::max(wmax, w[m]);
  }
  const double dz = std::sqrt(dz2);
  double lo = std::max(0.0, dz / tau - wmax * wmax);
  double hi = dz / tau;

  auto h_and_dh = [&](double nu, double& h, double& dh) {
    h = 0.0;
    dh = 0.0;
    for (int m = 0; m < n; ++m) {
      const double wm2 = w[m] * w[m];
      const double d = wm2 + nu;
      const double t = wm2 * z[m] * z[m] / (d * d);
      h += t;
      dh -= 2.0 * t / d;
    }
  };

  double nu = 0.5 * (lo + hi);
  double h, dh;
  for (int it = 0; it < 200; ++it) {
    h_and_dh(nu, h, dh);
    if (std::abs(h - tau2) <= 5e-15 * tau2) return nu;
    // maintain the bracket: h is decreasing in nu
    if (h > tau2)
      lo = nu;
    else
      hi = nu;
    // Newton step on 1/h(nu) = 1/tau^2; d(1/h) = -h'/h^2
    double step_to;
    if (dh != 0.0 && h > 0.0) {
      const double phi = 1.0 / h - 1.0 / tau2;
      const double dphi = -dh / (h * h);
      step_to = nu - phi / dphi;
    } else {
      step_to = 0.5 * (lo + hi);
    }
    if (!(step_to > lo && step_to < hi)) step_to = 0.5 * (lo + hi);
    if (step_to == nu) break;
    nu = step_to;
  }
  h_and_dh(nu, h, dh);
  if (std::abs(h - tau2) > 1e-12 * tau2)
    throw ProxError("newton_root: no convergence within 200 iterations");
  return nu;
}

namespace {

// One cyclic sweep over the dual blocks. gamma must equal
// y - tau * sum_l W^(l) * a^(l) on entry and is maintained. Records the root
// (0 when the group constraint is slack) in nu_raw when non-null; returns the
// largest change of any dual coordinate.
double bcd_pass(std::span<const double> y, double tau, const Weights& w, DualBlocks& a,
                Vector& gamma, Vector& scratch, Vector& wbuf, Vector* nu_raw, int& max_slack) {
  const int r = int(y.size());
  double delta = 0.0;
  max_slack = -1;
  for (int l = 0; l <= r - 2; ++l) {
    auto al = a.block(l);
    double qdinv = 0.0;
    for (int m = 0; m <= l; ++m) {
      const double wm = w(l, m);
      scratch[m] = gamma[m] + tau * wm * al[m];
      wbuf[m] = wm;
      const double t = scratch[m] / wm;
      qdinv += t * t;
    }
    if (qdinv <= tau * tau) {
      // slack block: absorbs the whole prefix, zeroing the group
      for (int m = 0; m <= l; ++m) {
        const double na = scratch[m] / (tau * wbuf[m]);
        delta = std::max(delta, std::abs(na - al[m]));
        al[m] = na;
        gamma[m] = 0.0;
      }
      if (nu_raw) (*nu_raw)[l] = 0.0;
      max_slack = l;
    } else {
      const double nu = newton_root({scratch.data(), std::size_t(l) + 1},
                                    {wbuf.data(), std::size_t(l) + 1}, tau);
      for (int m = 0; m <= l; ++m) {
        const double wm = wbuf[m];
        const double na = wm * scratch[m] / (tau * (wm * wm + nu));
        delta = std::max(delta, std::abs(na - al[m]));
        al[m] = na;
        gamma[m] = scratch[m] - tau * wm * na;
      }
      if (nu_raw) (*nu_raw)[l] = nu;
    }
  }
  return delta;
}

// Membership multipliers at the solution: ||(W * gamma)_{1:l}||/tau for
// groups with a nonzero prefix, 0 below the zero prefix.
Vector membership_nu(const Vector& gamma, double tau, const Weights& w, int zero_prefix) {
  const int r = int(gamma.size());
  Vector nu(std::size_t(std::max(r - 1, 0)), 0.0);
  for (int l = zero_prefix; l <= r - 2; ++l) {
    double q = 0.0;
    for (int m = 0; m <= l; ++m) {
      const double t = w(l, m) * gamma[m];
      q += t * t;
    }
    nu[l] = std::sqrt(q) / tau;
  }
  return nu;
}

}  // namespace

ProxResult prox_general(std::span<const double> y, double tau, WeightScheme scheme,
                        DualBlocks* warm) {
  const int r = int(y.size());
  if (r < 1) throw std::invalid_argument("prox_general: empty input");
  if (!(tau > 0.0)) throw std::invalid_argument("prox_general: tau must be positive");
  if (r == 1) return {Vector(y.begin(), y.end()), {}, 0};

  Weights w(r, scheme);
  DualBlocks local(r);
  DualBlocks& a = warm ? *warm : local;

  Vector gamma(y.begin(), y.end());
  for (int l = 0; l <= r - 2; ++l) {
    auto al = a.block(l);
    for (int m = 0; m <= l; ++m) gamma[m] -= tau * w(l, m) * al[m];
  }

  Vector scratch(std::size_t(r)), wbuf(std::size_t(r));
  int max_slack = -1;
  const int max_passes = 50000;
  bool settled = false;
  for (int pass = 0; pass < max_passes; ++pass) {
    const double delta = bcd_pass(y, tau, w, a, gamma, scratch, wbuf, nullptr, max_slack);
    if (delta <= 1e-14) {
      settled = true;
      break;
    }
  }
  if (!settled) throw ProxError("prox_general: dual coordinate descent did not settle");

  // At the fixed point the slack blocks form a prefix {0..max_slack}; the
  // later blocks vanish on it, so snap the numerical dust to exact zeros.
  const int zero_prefix = max_slack + 1;
  for (int m = 0; m < zero_prefix; ++m) gamma[m] = 0.0;

  ProxResult out;
  out.nu = membership_nu(gamma, tau, w, zero_prefix);
  out.zero_prefix = zero_prefix;
  out.gamma = std::move(gamma);
  return out;
}

ProxResult prox_unit(std::span<const double> y, double tau) {
  const int r = int(y.size());
  if (r < 1) throw std::invalid_argument("prox_unit: empty input");
  if (!(tau > 0.0)) throw std::invalid_argument("prox_unit: tau must be positive");
  if (r == 1) return {Vector(y.begin(), y.end()), {}, 0};

  // Group l shrinks the whole current prefix by s_l = (1 - tau/||prefix||)_+,
  // so coordinate m ends up scaled by the product of s_l over l >= m. The
  // running squared norm tracks the shrinkage without touching the prefix.
  Vector s(std::size_t(r - 1));
  double q = 0.0;
  int last_zero = -1;
  for (int l = 0; l <= r - 2; ++l) {
    q += y[l] * y[l];
    const double nrm = std::sqrt(q);
    if (nrm <= tau) {
      s[l] = 0.0;
      q = 0.0;
      last_zero = l;
    } else {
      s[l] = 1.0 - tau / nrm;
      q *= s[l] * s[l];
    }
  }

  Vector gamma(std::size_t(r));
  gamma[r - 1] = y[r - 1];
  double prod = 1.0;
  for (int m = r - 2; m >= 0; --m) {
    prod *= s[m];
    gamma[m] = y[m] * prod;
  }

  const int zero_prefix = last_zero + 1;
  ProxResult out;
  out.nu = membership_nu(gamma, tau, Weights(r, WeightScheme::Unit), zero_prefix);
  out.zero_prefix = zero_prefix;
  out.gamma = std::move(gamma);
  return out;
}

Vector taper_formula(std::span<const double> y, double tau, WeightScheme scheme) {
  const int r = int(y.size());
  if (r < 1) throw std::invalid_argument("taper_formula: empty input");
  if (!(tau > 0.0)) throw std::invalid_argument("taper_formula: tau must be positive");
  if (r == 1) return Vector(y.begin(), y.end());

  // Forward pass (from zero duals) to collect the roots nu_l.
  Weights w(r, scheme);
  DualBlocks a(r);
  Vector gamma(y.begin(), y.end());
  Vector scratch(std::size_t(r)), wbuf(std::size_t(r));
  Vector nu_raw(std::size_t(r - 1), 0.0);
  int max_slack = -1;
  bcd_pass(y, tau, w, a, gamma, scratch, wbuf, &nu_raw, max_slack);

  Vector out(std::size_t(r));
  out[r - 1] = y[r - 1];
  for (int m = 0; m <= r - 2; ++m) {
    double g = 1.0;
    for (int l = m; l <= r - 2; ++l) {
      const double nup = std::max(nu_raw[l], 0.0);
      const double wm = w(l, m);
      g *= nup / (wm * wm + nup);
    }
    out[m] = y[m] * g;
  }
  return out;
}

}  // namespace cholband

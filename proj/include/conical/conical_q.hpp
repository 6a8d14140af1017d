#pragma once

// Evaluators for Q^{-1/2-K}_{-1/2+i tau}(cosh chi), the conical function of
// the second kind, in its two exponential branches:
//   branch plus  ~ e^{-i tau chi} as chi -> infinity,
//   branch minus ~ e^{+i tau chi}.
// The two branches are related by Q_-(tau) = Q_+(-tau) for every order.
//
// The series representation is evaluated in the overflow-free scaled form
//   Q_+ = prefQ e^{K chi} e^{-i tau chi} sum_{n>=0} etilde_n / (n + w),
//   w = -K + i tau,
// whose simple poles sit at tau = i(n-K) with residue -i Rtilde_n.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "coefficients.hpp"
#include "conical_p.hpp"
#include "numeric.hpp"
#include "types.hpp"

namespace conical {

enum class Branch { plus, minus };

struct QPole {
  int n = 0;
  ComplexValue location{0, 0};
  ComplexValue residue{0, 0};
};

namespace detail {

// Distance from tau to the nearest series pole i(n-K), n >= 0.
inline double q_pole_distance(double K, ComplexValue tau) {
  ComplexValue w = ComplexValue(-K, 0.0) + ComplexValue(0.0, 1.0) * tau;
  int n_star = static_cast<int>(std::lround(std::max(0.0, -w.real())));
  double best = 1e300;
  for (int n = std::max(0, n_star - 1); n <= n_star + 1; ++n)
    best = std::min(best, std::abs(static_cast<double>(n) + w));
  return best;
}

// Scaled plus-branch series sum with asymptotic tail completion.
inline ComplexValue q_series_core(const CoeffTable& t, ComplexValue tau) {
  double K = t.K, chi = t.chi;
  ComplexValue w = ComplexValue(-K, 0.0) + ComplexValue(0.0, 1.0) * tau;
  DDAccumulator re_acc, im_acc;
  for (int n = 0; n <= t.internal_max; ++n) {
    ComplexValue term =
        t.etilde_scaled[static_cast<std::size_t>(n)] /
        (static_cast<double>(n) + w);
    re_acc.add(term.real());
    im_acc.add(term.imag());
  }
  ComplexValue acc(re_acc.sum(), im_acc.sum());
  if (!is_integer(K)) {
    // Asymptotic stretch followed by Hurwitz-zeta pure-power tails.
    EtildeAsym ea = etilde_asym_make(K, chi);
    int n2 = t.internal_max +
             std::max(200, static_cast<int>(std::ceil(20.0 / chi)));
    n2 = std::max(n2, static_cast<int>(std::ceil(2.0 * std::abs(w))) + 10);
    for (int n = t.internal_max + 1; n <= n2; ++n)
      acc += ea.eval(n) / (static_cast<double>(n) + w);
    double base = static_cast<double>(n2) + 1.0;
    for (int jj = 0; jj < 7; ++jj) {
      double a_exp = -K - jj;
      SignedLog gden = log_gamma_real_signed(a_exp);
      if (!std::isfinite(gden.log_abs)) continue;
      double rg = gden.sign * std::exp(-gden.log_abs);  // 1/Gamma(-K-jj)
      double c1 = 0.5 * (-K - jj - 1.0) * (-K - jj);
      ComplexValue zsum(0.0, 0.0);
      ComplexValue pw(1.0, 0.0);
      for (int m = 0; m < 48; ++m) {
        double s0 = K + jj + 2.0 + m;
        ComplexValue d =
            pw * (hurwitz_zeta(s0, base) + c1 * hurwitz_zeta(s0 + 1.0, base));
        zsum += d;
        if (std::abs(d) < 1e-18 * (std::abs(zsum) + 1e-300)) break;
        pw *= -w;
      }
      acc += ea.h[jj] * rg * zsum;
    }
  }
  ComplexValue pref = t.q_pref * std::exp(K * chi) *
                      std::exp(ComplexValue(0.0, -1.0) * tau * chi);
  return pref * acc;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Closed elementary forms, K in {-1, 0, 1}
// ---------------------------------------------------------------------------

inline ComplexValue q_elementary(const ConicalPoint& point, Branch branch) {
  point.validate();
  double K = point.K, chi = point.chi;
  ComplexValue tau = (branch == Branch::plus) ? point.tau : -point.tau;
  if (!(detail::is_integer(K) && (K == -1.0 || K == 0.0 || K == 1.0)))
    throw UnsupportedOrder("closed form available only for K in {-1, 0, 1}");
  double s = std::sinh(chi);
  double pref = std::sqrt(kPi / (2.0 * s));
  ComplexValue phase = std::exp(ComplexValue(0.0, -1.0) * tau * chi);
  if (K == -1.0) return ComplexValue(0.0, 1.0) * pref * phase;
  if (K == 0.0) {
    if (std::abs(tau) < 1e-10) throw PoleHit("series pole at tau = 0");
    return -pref * phase / tau;
  }
  // K = 1, plus branch in the reflected variable:
  // -(pi/(2 sinh chi))^{1/2} e^{-i tau chi} (coth chi + i tau)/(tau(tau^2+1)).
  double coth = 1.0 / std::tanh(chi);
  if (std::abs(tau) < 1e-10 ||
      std::abs(tau - ComplexValue(0, 1)) < 1e-10 ||
      std::abs(tau + ComplexValue(0, 1)) < 1e-10)
    throw PoleHit("series pole at tau in {0, i, -i}");
  return -pref * phase * (coth + ComplexValue(0.0, 1.0) * tau) /
         (tau * (tau * tau + 1.0));
}

// ---------------------------------------------------------------------------
// Sinc-type series
// ---------------------------------------------------------------------------

inline ComplexValue q_sinc_series(const ConicalPoint& point,
                                  const CoeffTable& table,
                                  Branch branch = Branch::plus) {
  point.validate();
  if (table.K != point.K && !(table.raise_order && point.K == -1.0))
    throw UsageError("table order does not match evaluation point");
  if (table.chi != point.chi)
    throw UsageError("table argument does not match evaluation point");
  ComplexValue tau = (branch == Branch::plus) ? point.tau : -point.tau;
  double chi = point.chi;
  if (table.raise_order) {
    // K = -1: raise the zero-order series by one order; the 1/tau pole of
    // the base series cancels exactly, leaving i (pi/(2 sinh))^{1/2}
    // e^{-i tau chi}.  (The base series is a single band term.)
    double pref = std::sqrt(kPi / (2.0 * std::sinh(chi)));
    return ComplexValue(0.0, 1.0) * pref *
           std::exp(ComplexValue(0.0, -1.0) * tau * chi);
  }
  if (detail::q_pole_distance(table.K, tau) < 1e-10)
    throw PoleHit("evaluation point within 1e-10 of a series pole");
  return detail::q_series_core(table, tau);
}

// ---------------------------------------------------------------------------
// Direct quadrature of the semi-infinite integral representation
// ---------------------------------------------------------------------------

inline ComplexValue q_direct(const ConicalPoint& point, Branch branch,
                             const QuadSettings& settings = {}) {
  point.validate();
  double K = point.K, chi = point.chi;
  ComplexValue tau = (branch == Branch::plus) ? point.tau : -point.tau;
  if (!(K > -1.0))
    throw RegionViolation("integral representation requires K > -1");
  double decay = -tau.imag() - K;
  if (decay < 0.05)
    throw RegionViolation(
        "integrand decay rate -Im(tau)-K below 0.05: representation invalid "
        "or too slowly convergent");
  double inv_c = 1.0 / std::cosh(chi);
  auto f = [&](double w) -> ComplexValue {
    // cosh(w)/cosh(chi) - 1 in product form: accurate arbitrarily close to
    // the endpoint, where the direct subtraction loses all digits.
    double b = 2.0 * std::sinh(0.5 * (w + chi)) * std::sinh(0.5 * (w - chi)) *
               inv_c;
    return std::exp(ComplexValue(0.0, -1.0) * w * tau) * std::pow(b, K);
  };
  // Endpoint w = chi carries the (w-chi)^K branch factor; integrate the
  // first unit interval with the matched substitution, then the tail with
  // the oscillatory panel rule.
  double mid = chi + 1.0;
  double left_exp = detail::is_integer(K) ? 0.0 : K;
  QuadResult head = quad_finite(f, chi, mid, settings, left_exp, 0.0);
  QuadResult tail = quad_semi_infinite_oscillatory(f, mid, decay, settings);
  double g = reciprocal_gamma_real(1.0 + K);
  ComplexValue pref = -std::sqrt(kPi / (2.0 * std::sinh(chi))) *
                      ComplexValue(0.0, 1.0) *
                      std::exp(ComplexValue(0.0, -K * kPi)) *
                      std::pow(std::tanh(chi), -K) * g;
  return pref * (head.value + tail.value);
}

// ---------------------------------------------------------------------------
// Order ladder (same three-term relation as the first kind)
// ---------------------------------------------------------------------------

inline ComplexValue q_recurrence_step(int ell, ComplexValue tau, double chi,
                                      ComplexValue q_ell,
                                      ComplexValue q_ell_minus_1) {
  return p_recurrence_step(ell, tau, chi, q_ell, q_ell_minus_1);
}

// ---------------------------------------------------------------------------
// Pole census
// ---------------------------------------------------------------------------

// The plus-branch series has simple poles at tau = i(n-K), n = 0..n_max,
// with residue -pi R^K_{n-K} = -i Rtilde_n.
inline std::vector<QPole> q_poles(double K, double chi, int n_max,
                                  const CoeffTable& table) {
  if (table.K != K || table.chi != chi)
    throw UsageError("table does not match requested pole census");
  if (n_max < 0) throw UsageError("n_max must be nonnegative");
  std::vector<QPole> out;
  // The raised order (K = -1) is entire in tau: the candidate pole of the
  // base series cancels against the raising factor, so the census is empty.
  if (table.raise_order) return out;
  double lq = std::log(std::abs(table.q_pref));
  for (int n = 0; n <= n_max; ++n) {
    double et = (n < static_cast<int>(table.etilde_scaled.size()))
                    ? table.etilde_scaled[static_cast<std::size_t>(n)]
                    : 0.0;
    double lmag =
        (et == 0.0) ? -1e300 : lq + std::log(std::abs(et)) + n * chi;
    if (lmag > 690.0)
      throw TailTooLarge("residue magnitude exceeds double range");
    ComplexValue rtilde = table.q_pref * et * std::exp(n * chi);
    QPole p;
    p.n = n;
    p.location = ComplexValue(0.0, n - K);
    p.residue = ComplexValue(0.0, -1.0) * rtilde;
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hypergeometric / large-argument form
// ---------------------------------------------------------------------------

namespace detail {

// Q^{mu}_{nu}(cosh chi) = e^{i mu pi} pi^{1/2} Gamma(nu+mu+1) /
//   (2^{nu+1} Gamma(nu+3/2)) sinh^mu(chi) cosh^{-nu-mu-1}(chi)
//   * F((nu+mu)/2+1, (nu+mu+1)/2; nu+3/2; sech^2 chi),
// plus branch.  Converges for every chi > 0; the sech^2 argument makes it an
// expansion in e^{-2chi} at large chi.
inline ComplexValue q_hyp_form(double K, ComplexValue tau, double chi,
                               const QuadSettings& settings = {}) {
  ComplexValue mu(-0.5 - K, 0.0);
  ComplexValue nu = ComplexValue(-0.5, 0.0) + ComplexValue(0.0, 1.0) * tau;
  ComplexValue lg_top = log_gamma_complex(nu + mu + 1.0);
  ComplexValue lg_bot = log_gamma_complex(nu + 1.5);
  double z = 1.0 / (std::cosh(chi) * std::cosh(chi));
  ComplexValue f =
      hyp2f1(0.5 * (nu + mu) + 1.0, 0.5 * (nu + mu + 1.0), nu + 1.5,
             ComplexValue(z, 0.0), settings.rel_tol);
  ComplexValue log_pref = ComplexValue(0.0, 1.0) * mu * kPi +
                          0.5 * std::log(kPi) + lg_top -
                          (nu + 1.0) * std::log(2.0) - lg_bot +
                          mu * std::log(std::sinh(chi)) -
                          (nu + mu + 1.0) * std::log(std::cosh(chi));
  return std::exp(log_pref) * f;
}

}  // namespace detail

// Large-argument evaluation: the truncated expansion
//   Q -> -i pi^{1/2} e^{-i pi K} Gamma(i tau - K) / [(2 cosh chi)^{1/2+i tau}
//        Gamma(i tau + 1)] (1 + (1+2K)/(4 cosh^2 chi))
//        (1 + (i tau - K)(i tau - K + 1)/(4 cosh^2 chi (i tau + 1))).
// Accuracy is set by the dropped O(sech^4 chi) terms; intended for chi >~ 5
// (caller judgment -- the function itself does not gate).
inline ComplexValue q_asymptotic(const ConicalPoint& point, Branch branch) {
  point.validate();
  ComplexValue tau = (branch == Branch::plus) ? point.tau : -point.tau;
  double K = point.K, chi = point.chi;
  ComplexValue it = ComplexValue(0.0, 1.0) * tau;
  ComplexValue lg = log_gamma_complex(it - K) - log_gamma_complex(it + 1.0) -
                    (0.5 + it) * std::log(2.0 * std::cosh(chi));
  ComplexValue pref = ComplexValue(0.0, -1.0) * std::sqrt(kPi) *
                      std::exp(ComplexValue(0.0, -kPi * K)) * std::exp(lg);
  double c2 = 4.0 * std::cosh(chi) * std::cosh(chi);
  ComplexValue corr1 = 1.0 + (1.0 + 2.0 * K) / c2;
  ComplexValue corr2 = 1.0 + (it - K) * (it - K + 1.0) / (c2 * (it + 1.0));
  return pref * corr1 * corr2;
}

// ---------------------------------------------------------------------------
// Integer-order re-expansion of the degree-shifted function
// ---------------------------------------------------------------------------

// Evaluates M(K) = Q^{-1/2-K}_{-1/2+K+i tau} for non-integer K > -1 from the
// integer family M(l) = Q^{-1/2-l}_{-1/2+l+i tau}:
//   M(K) = e^{-i K pi} (2 sinh chi)^{-K} sum_{n>=0} (-1)^n / Gamma(K+1-n)
//          sum_{l=0}^n (2 sinh chi)^l / (n-l)! M(l).
// The inner sums alternate through the e^{-i l pi} factor carried by M(l),
// producing ~2^n cancellation; blocks are therefore summed only while they
// remain numerically meaningful and the algebraic tail (known exponent
// K+1-Im tau... see below) is completed by a fitted continuation.
inline ComplexValue q_integer_expansion(double K, ComplexValue tau, double chi,
                                        int ell_max,
                                        const QuadSettings& settings = {}) {
  settings.validate();
  if (!(chi > 0.0)) throw UsageError("chi must be positive");
  if (!(K > -1.0)) throw UsageError("re-expansion requires K > -1");
  if (ell_max < 0) throw UsageError("ell_max must be nonnegative");
  bool integer_k = detail::is_integer(K);
  double sigma = -tau.imag();
  if (!integer_k) {
    if (sigma <= 0.0)
      throw RegionViolation(
          "re-expansion requires Im tau < 0 for algebraic convergence");
    if (ell_max < 10) throw UsageError("ell_max too small for tail completion");
  }

  // For integer K the outer sum collapses: 1/Gamma(K+1-n) = 0 for n > K.
  // For non-integer K, blocks beyond ~26 drown in the ~2^n inner cancellation.
  int n_top = integer_k
                  ? std::min(ell_max, static_cast<int>(std::lround(K)))
                  : std::min(ell_max, 26);
  double two_s = 2.0 * std::sinh(chi);
  double l2s = std::log(two_s);

  // Shifted-degree integer values M(l) via the scaled series.
  std::vector<ComplexValue> ml(static_cast<std::size_t>(n_top) + 1);
  for (int l = 0; l <= n_top; ++l) {
    auto tbl = shared_table(static_cast<double>(l), chi, 48, settings);
    ConicalPoint pt{static_cast<double>(l), tau - ComplexValue(0.0, l), chi};
    ml[static_cast<std::size_t>(l)] = q_sinc_series(pt, *tbl, Branch::plus);
  }

  ComplexValue sum(0.0, 0.0);
  std::vector<ComplexValue> blocks(static_cast<std::size_t>(n_top) + 1);
  for (int n = 0; n <= n_top; ++n) {
    ComplexValue inner(0.0, 0.0);
    for (int l = 0; l <= n; ++l)
      inner += std::exp(l * l2s - std::lgamma(n - l + 1.0)) *
               ml[static_cast<std::size_t>(l)];
    double coef = reciprocal_gamma_real(K + 1.0 - n);  // 0 at the Gamma poles
    ComplexValue b = ((n % 2 == 0) ? 1.0 : -1.0) * coef * inner;
    blocks[static_cast<std::size_t>(n)] = b;
    sum += b;
  }
  // Tail completion (non-integer K): blocks decay algebraically with the
  // known leading exponent q = K + 1 + sigma.  Fit
  //   b_n = c n^{-q} + d n^{-q-1} + e n^{-q-2}
  // on the last three same-parity blocks and sum the fitted model over
  // n > n_top with Hurwitz zeta values.
  if (!integer_k && n_top >= 6) {
    double q_exp = K + 1.0 + sigma;
    int ns[3] = {n_top - 4, n_top - 2, n_top};
    ComplexValue a[3][3], rhs[3];
    for (int i = 0; i < 3; ++i) {
      double n = ns[i];
      a[i][0] = std::pow(n, -q_exp);
      a[i][1] = std::pow(n, -q_exp - 1.0);
      a[i][2] = std::pow(n, -q_exp - 2.0);
      rhs[i] = blocks[static_cast<std::size_t>(ns[i])];
    }
    // Gaussian elimination on the fixed 3x3 system.
    for (int col = 0; col < 2; ++col) {
      int piv = col;
      for (int r = col + 1; r < 3; ++r)
        if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
      std::swap(a[piv], a[col]);
      std::swap(rhs[piv], rhs[col]);
      for (int r = col + 1; r < 3; ++r) {
        ComplexValue f = a[r][col] / a[col][col];
        for (int cc = col; cc < 3; ++cc) a[r][cc] -= f * a[col][cc];
        rhs[r] -= f * rhs[col];
      }
    }
    ComplexValue e = rhs[2] / a[2][2];
    ComplexValue d = (rhs[1] - a[1][2] * e) / a[1][1];
    ComplexValue c = (rhs[0] - a[0][1] * d - a[0][2] * e) / a[0][0];
    double base = n_top + 1.0;
    ComplexValue tail = c * detail::hurwitz_zeta(q_exp, base) +
                        d * detail::hurwitz_zeta(q_exp + 1.0, base) +
                        e * detail::hurwitz_zeta(q_exp + 2.0, base);
    sum += tail;
    if (std::abs(tail) > 0.1 * std::abs(sum))
      throw TruncationWarning(
          "fitted tail dominates the computable blocks; result unreliable");
  }
  ComplexValue pref = std::exp(ComplexValue(0.0, -K * kPi)) *
                      std::pow(two_s, -K);
  return pref * sum;
}

}  // namespace conical

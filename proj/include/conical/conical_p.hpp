#pragma once

// Evaluators for P^{-1/2-K}_{-1/2+i tau}(cosh chi), the conical function of
// the first kind with order mu = -1/2 - K.
//
// Representations:
//   * p_elementary       closed trigonometric forms for K in {-1, 0, 1}
//   * p_sinc_series      shifted-sinc expansion driven by a CoeffTable
//   * p_direct           quadrature of the finite integral representation
//   * p_derivative_form  integer orders by backward order recursion
//   * p_recurrence_step  one step of the order ladder
//   * p_integer_expansion  re-expansion of non-integer orders over integer ones

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "coefficients.hpp"
#include "numeric.hpp"
#include "types.hpp"

#if defined(__SIZEOF_FLOAT128__) && __has_include(<quadmath.h>)
#include <quadmath.h>
#define CONICAL_HAVE_QUADMATH 1
#else
#define CONICAL_HAVE_QUADMATH 0
#endif

namespace conical {

namespace detail {

#if CONICAL_HAVE_QUADMATH
using quad_real = __float128;
inline quad_real q_sin(quad_real x) { return sinq(x); }
inline quad_real q_cos(quad_real x) { return cosq(x); }
inline quad_real q_sinh(quad_real x) { return sinhq(x); }
inline quad_real q_cosh(quad_real x) { return coshq(x); }
inline quad_real q_tanh(quad_real x) { return tanhq(x); }
inline quad_real q_fabs(quad_real x) { return fabsq(x); }
inline quad_real q_log(quad_real x) { return logq(x); }
inline quad_real q_exp(quad_real x) { return expq(x); }
inline quad_real q_sqrt(quad_real x) { return sqrtq(x); }
inline quad_real q_ldexp(quad_real x, int e) { return ldexpq(x, e); }
inline quad_real q_pi() { return quad_real(2) * acosq(quad_real(0)); }
#else
using quad_real = long double;
inline quad_real q_sin(quad_real x) { return std::sin(x); }
inline quad_real q_cos(quad_real x) { return std::cos(x); }
inline quad_real q_sinh(quad_real x) { return std::sinh(x); }
inline quad_real q_cosh(quad_real x) { return std::cosh(x); }
inline quad_real q_tanh(quad_real x) { return std::tanh(x); }
inline quad_real q_fabs(quad_real x) { return std::fabs(x); }
inline quad_real q_log(quad_real x) { return std::log(x); }
inline quad_real q_exp(quad_real x) { return std::exp(x); }
inline quad_real q_sqrt(quad_real x) { return std::sqrt(x); }
inline quad_real q_ldexp(quad_real x, int e) { return std::ldexp(x, e); }
inline quad_real q_pi() { return 2.0L * std::acos(quad_real(0)); }
#endif

inline bool is_real(ComplexValue z) { return z.imag() == 0.0; }
inline bool is_pure_imag(ComplexValue z) {
  return z.real() == 0.0 && z.imag() != 0.0;
}

// One symmetric pair term (n, -n) of the sinc expansion
//   pair_n = 2 C a_n [sinc(tau - i n) + sinc(tau + i n)]
//          = 4 C [tau sin(tau chi) a_n cosh(n chi)
//                 + n cos(tau chi) a_n sinh(n chi)] / (tau^2 + n^2),
// with a_n cosh(n chi) = rho_n (1 + e^{-2 n chi})/2 and
//      a_n sinh(n chi) = rho_n (1 - e^{-2 n chi})/2.
// Near tau = +-i n (where the combined quotient degenerates) it keeps the
// two-term shifted-sinc form, which sinc_shifted evaluates continuously.
inline ComplexValue p_pair_term(double c_pref, double rho_n, int n, double chi,
                                ComplexValue tau, ComplexValue sin_tc,
                                ComplexValue cos_tc) {
  ComplexValue denom = tau * tau + static_cast<double>(n) * n;
  double near_pole =
      std::min(std::abs(tau - ComplexValue(0.0, n)),
               std::abs(tau + ComplexValue(0.0, n)));
  if (near_pole < 0.3) {
    double r_n = c_pref * rho_n * std::exp(-n * chi);
    return 2.0 * r_n *
           (sinc_shifted(tau, ComplexValue(0.0, n), chi) +
            sinc_shifted(tau, ComplexValue(0.0, -n), chi));
  }
  double em = std::exp(-2.0 * n * chi);
  double ac = 0.5 * rho_n * (1.0 + em);
  double as = 0.5 * rho_n * (1.0 - em);
  return 4.0 * c_pref * (tau * sin_tc * ac + static_cast<double>(n) * cos_tc * as) /
         denom;
}

// Tail of the sinc expansion beyond the table range, for non-integer K:
// an explicit stretch using the large-n asymptotic coefficients followed by
// Hurwitz-zeta sums for the pure power part.
inline ComplexValue p_series_tail(const CoeffTable& t, ComplexValue tau,
                                  ComplexValue sin_tc, ComplexValue cos_tc) {
  double K = t.K, chi = t.chi;
  int n0 = t.internal_max + 1;
  int n2 = t.internal_max +
           std::max(200, static_cast<int>(std::ceil(20.0 / chi)));
  n2 = std::max(n2, static_cast<int>(std::ceil(2.0 * std::abs(tau))) + 10);
  ComplexValue acc(0.0, 0.0);
  for (int n = n0; n <= n2; ++n) {
    double rho_n = rho_asym(K, chi, n);
    acc += p_pair_term(t.c_pref, rho_n, n, chi, tau, sin_tc, cos_tc);
  }
  // Pure-power zeta tail: rho_n ~ W sum_j c_j Gamma(K+1+j) n^{-K-1-j},
  // 1/(tau^2+n^2) and n/(tau^2+n^2) expanded in tau^2/n^2.
  double alpha = 0.5 / std::tanh(chi);
  double beta = 1.0 / 6.0;
  double gam = std::tanh(chi);
  gam = 1.0 / (24.0 * gam);
  double cj[4] = {1.0, K * alpha, K * beta + 0.5 * K * (K - 1.0) * alpha * alpha,
                  K * gam + K * (K - 1.0) * alpha * beta +
                      K * (K - 1.0) * (K - 2.0) * alpha * alpha * alpha / 6.0};
  double W = -(std::sin(K * kPi) / kPi) * std::pow(std::tanh(chi), K);
  double base = static_cast<double>(n2) + 1.0;
  ComplexValue t2 = tau * tau;
  ComplexValue ztail(0.0, 0.0);
  for (int jj = 0; jj < 4; ++jj) {
    ComplexValue zc(0.0, 0.0), zs(0.0, 0.0);
    ComplexValue pw(1.0, 0.0);
    for (int m = 0; m < 48; ++m) {
      double sc = K + 3.0 + jj + 2.0 * m;
      double ss = K + 2.0 + jj + 2.0 * m;
      ComplexValue dc = pw * hurwitz_zeta(sc, base);
      ComplexValue ds = pw * hurwitz_zeta(ss, base);
      zc += dc;
      zs += ds;
      if (std::abs(dc) + std::abs(ds) <
          1e-18 * (std::abs(zc) + std::abs(zs) + 1e-300))
        break;
      pw *= -t2;
    }
    ztail += cj[jj] * std::tgamma(K + 1.0 + jj) * (tau * sin_tc * zc + cos_tc * zs);
  }
  return acc + 2.0 * t.c_pref * W * ztail;
}

// Shared series core: 2 R_0 sinc(tau; chi) + sum of pair terms (+ tail).
inline ComplexValue p_series_sum(const CoeffTable& t, ComplexValue tau) {
  double chi = t.chi;
  ComplexValue sin_tc = std::sin(tau * chi);
  ComplexValue cos_tc = std::cos(tau * chi);
  ComplexValue acc = 2.0 * t.c_pref * t.rho_scaled[0] *
                     sinc_shifted(tau, ComplexValue(0.0, 0.0), chi);
  bool integer_k = is_integer(t.K);
  int top = integer_k
                ? std::min<int>(static_cast<int>(std::lround(t.K)),
                                t.internal_max)
                : t.internal_max;
  for (int n = 1; n <= top; ++n)
    acc += p_pair_term(t.c_pref, t.rho_scaled[static_cast<std::size_t>(n)], n,
                       chi, tau, sin_tc, cos_tc);
  if (!integer_k) {
    ComplexValue tail = p_series_tail(t, tau, sin_tc, cos_tc);
    acc += tail;
    if (std::abs(tail) > 0.05 * std::abs(acc) && std::abs(acc) > 0.0)
      throw TruncationWarning("series tail dominates: table range too small");
  }
  return acc;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Closed elementary forms, K in {-1, 0, 1}
// ---------------------------------------------------------------------------

inline ComplexValue p_elementary(const ConicalPoint& point) {
  point.validate();
  double K = point.K, chi = point.chi;
  ComplexValue tau = point.tau;
  if (!(detail::is_integer(K) && (K == -1.0 || K == 0.0 || K == 1.0)))
    throw UnsupportedOrder("closed form available only for K in {-1, 0, 1}");
  double s = std::sinh(chi);
  double pref = std::sqrt(2.0 / (kPi * s));
  if (K == 0.0) return pref * sinc_shifted(tau, ComplexValue(0, 0), chi);
  if (K == -1.0) return pref * std::cos(tau * chi);
  // K = 1: (2/(pi sinh chi))^{1/2} (tau^2+1)^{-1} [coth(chi) sin(tau chi)/tau
  //        - cos(tau chi)], evaluated through the pair form so the removable
  //        points tau = +-i stay finite.
  double coth = 1.0 / std::tanh(chi);
  double c_pref = std::sqrt(1.0 / (2.0 * kPi * s)) * coth;  // C(1, chi)
  ComplexValue sin_tc = std::sin(tau * chi);
  ComplexValue cos_tc = std::cos(tau * chi);
  ComplexValue acc = 2.0 * c_pref * sinc_shifted(tau, ComplexValue(0, 0), chi);
  double rho_1 = -0.5 / std::cosh(chi) * std::exp(chi);  // a_1 e^{chi}
  acc += detail::p_pair_term(c_pref, rho_1, 1, chi, tau, sin_tc, cos_tc);
  return acc;
}

// ---------------------------------------------------------------------------
// Sinc series
// ---------------------------------------------------------------------------

inline ComplexValue p_sinc_series(const ConicalPoint& point,
                                  const CoeffTable& table) {
  point.validate();
  if (table.K != point.K && !(table.raise_order && point.K == -1.0))
    throw UsageError("table order does not match evaluation point");
  if (table.chi != point.chi)
    throw UsageError("table argument does not match evaluation point");
  if (table.raise_order) {
    // K = -1 carries no series of its own: raise the K = 0 series by one
    // order through the exact connection
    //   P^{1/2} = i tau P^{-1/2} + (2/(pi sinh chi))^{1/2} e^{-i tau chi}.
    CoeffTable base = table;
    base.K = 0.0;
    base.raise_order = false;
    ComplexValue p0 = detail::p_series_sum(base, point.tau);
    double pref = std::sqrt(2.0 / (kPi * std::sinh(point.chi)));
    return ComplexValue(0.0, 1.0) * point.tau * p0 +
           pref * std::exp(ComplexValue(0.0, -1.0) * point.tau * point.chi);
  }
  ComplexValue v = detail::p_series_sum(table, point.tau);
  if (detail::is_real(point.tau)) return ComplexValue(v.real(), 0.0);
  return v;
}

// ---------------------------------------------------------------------------
// Direct quadrature of the finite integral representation
// ---------------------------------------------------------------------------

inline ComplexValue p_direct(const ConicalPoint& point,
                             const QuadSettings& settings = {}) {
  point.validate();
  double K = point.K, chi = point.chi;
  ComplexValue tau = point.tau;
  if (!(K > -1.0)) throw UsageError("direct form requires K > -1");
  double g = reciprocal_gamma_real(1.0 + K);
  double inv_c = 1.0 / std::cosh(chi);
  auto f = [&](double w) -> ComplexValue {
    double b = 1.0 - std::cosh(w) * inv_c;
    return std::cos(w * tau) * std::pow(b, K);
  };
  // Endpoint behaviour at w = chi: (1 - cosh w sech chi)^K ~ (tanh chi)^K
  // (chi - w)^K.
  double right_exp = detail::is_integer(K) ? 0.0 : K;
  QuadResult q = quad_finite(f, 0.0, chi, settings, 0.0, right_exp);
  double pref = std::sqrt(2.0 / (kPi * std::sinh(chi))) *
                std::pow(std::tanh(chi), -K) * g;
  ComplexValue v = pref * q.value;
  if (detail::is_real(tau)) return ComplexValue(v.real(), 0.0);
  return v;
}

// ---------------------------------------------------------------------------
// Exact trig-polynomial form for integer orders
// ---------------------------------------------------------------------------

namespace detail {

// How far above the highest requested order a backward trial recursion must
// start.  The two solutions of the order ladder separate per step by the
// factor e^{-2 log coth(chi/2)}; the margin makes the accumulated separation
// exceed the extended-precision epsilon, so the trial sequence has fully
// relaxed onto the decaying family by the time it reaches the stored range.
inline int ladder_descent_margin(double chi, double abs_tau) {
  double delta = 2.0 * std::log(1.0 / std::tanh(0.5 * chi));
  int extra = static_cast<int>(std::ceil(84.0 / std::max(delta, 3e-4)));
  return std::min(extra, 300000) + static_cast<int>(std::ceil(abs_tau)) + 8;
}

// Integer-order members P^{-1/2-l}, l = 0..lmax, for real tau^2 (tau real or
// pure imaginary), computed in extended precision by backward recursion on
//   [tau^2+(l+1)^2] P_{l+1} = (2l+1) coth(chi) P_l - P_{l-1}
// and normalized against the closed l = 0 / l = 1 rows.  Going downward the
// physical family is the dominant direction, so this is stable at any order,
// unlike upward propagation.  s_val = sin(tau chi)/tau and c_val =
// cos(tau chi), continued to sinh/cosh for pure imaginary tau.  Deep rows
// may underflow to zero; callers treat that as an exact small value.
inline std::vector<quad_real> ladder_rows_quad(quad_real t2, quad_real s_val,
                                               quad_real c_val, double chi,
                                               int lmax) {
  quad_real qchi = chi;
  quad_real coth = q_cosh(qchi) / q_sinh(qchi);
  double abs_tau = std::sqrt(std::abs(static_cast<double>(t2)));
  int L = lmax + ladder_descent_margin(chi, abs_tau);
  const int kShift = 12000;  // exact power-of-two rescaling quantum
  const quad_real kBig = q_ldexp(quad_real(1), kShift);
  std::vector<quad_real> rows(static_cast<std::size_t>(lmax) + 1, quad_real(0));
  std::vector<int> rsc(static_cast<std::size_t>(lmax) + 1, 0);
  quad_real t_hi = 0, t_cur = 1;
  int k = 0;  // rescale count: true value = stored * 2^{kShift * k at store}
  for (int j = L; j >= 1; --j) {
    quad_real t_lo = quad_real(2 * j + 1) * coth * t_cur -
                     (t2 + quad_real(j + 1) * quad_real(j + 1)) * t_hi;
    t_hi = t_cur;
    t_cur = t_lo;
    if (q_fabs(t_cur) > kBig) {
      t_cur = q_ldexp(t_cur, -kShift);
      t_hi = q_ldexp(t_hi, -kShift);
      ++k;
    }
    int idx = j - 1;
    if (idx <= lmax) {
      rows[static_cast<std::size_t>(idx)] = t_cur;
      rsc[static_cast<std::size_t>(idx)] = k;
    }
  }
  // Anchor on whichever closed row is larger (the l = 1 row degenerates into
  // a 0/0 limit at tau^2 = -1, so it is skipped there).
  quad_real pref = q_sqrt(quad_real(2) / (q_pi() * q_sinh(qchi)));
  quad_real p0 = pref * s_val;
  bool have_p1 = q_fabs(t2 + quad_real(1)) > quad_real(1e-8);
  quad_real p1 = have_p1 ? pref * (coth * s_val - c_val) / (t2 + quad_real(1))
                         : quad_real(0);
  int ia = (!have_p1 || q_fabs(p0) >= q_fabs(p1)) ? 0 : 1;
  quad_real anchor = (ia == 0) ? p0 : p1;
  quad_real ratio = anchor / rows[static_cast<std::size_t>(ia)];
  int ka = rsc[static_cast<std::size_t>(ia)];
  for (int l = 0; l <= lmax; ++l) {
    std::size_t ul = static_cast<std::size_t>(l);
    rows[ul] = q_ldexp(rows[ul] * ratio, kShift * (rsc[ul] - ka));
  }
  return rows;
}

}  // namespace detail

inline ComplexValue p_derivative_form(int ell, ComplexValue tau, double chi) {
  if (ell < 0 || ell > 64)
    throw UnsupportedOrder("integer-order form supports 0 <= ell <= 64");
  if (!(chi > 0.0)) throw UsageError("chi must be positive");
  // The two lowest rows are closed forms (finite at tau = +-i through the
  // paired shifted-sinc evaluation).
  if (ell == 0) return p_elementary({0.0, tau, chi});
  if (ell == 1) return p_elementary({1.0, tau, chi});

  if (detail::is_real(tau) || detail::is_pure_imag(tau)) {
    using detail::quad_real;
    quad_real qchi = chi;
    quad_real t2, s_val, c_val;
    if (detail::is_real(tau)) {
      quad_real qt = tau.real();
      t2 = qt * qt;
      s_val = (tau.real() == 0.0) ? qchi : detail::q_sin(qt * qchi) / qt;
      c_val = detail::q_cos(qt * qchi);
    } else {
      quad_real qt = tau.imag();  // tau = i qt
      t2 = -qt * qt;
      s_val = detail::q_sinh(qt * qchi) / qt;
      c_val = detail::q_cosh(qt * qchi);
    }
    std::vector<quad_real> rows =
        detail::ladder_rows_quad(t2, s_val, c_val, chi, ell);
    return ComplexValue(
        static_cast<double>(rows[static_cast<std::size_t>(ell)]), 0.0);
  }

  // General complex tau: double-precision backward recursion with exact
  // power-of-two rescaling, anchored the same way.
  ComplexValue t2 = tau * tau;
  double coth = 1.0 / std::tanh(chi);
  int L = ell + detail::ladder_descent_margin(chi, std::abs(tau));
  const int kShift = 512;
  const double kBig = std::ldexp(1.0, kShift);
  std::vector<ComplexValue> rows(static_cast<std::size_t>(ell) + 1);
  std::vector<int> rsc(static_cast<std::size_t>(ell) + 1, 0);
  ComplexValue t_hi(0, 0), t_cur(1, 0);
  int k = 0;
  for (int j = L; j >= 1; --j) {
    ComplexValue t_lo = (2.0 * j + 1.0) * coth * t_cur -
                        (t2 + static_cast<double>(j + 1) * (j + 1)) * t_hi;
    t_hi = t_cur;
    t_cur = t_lo;
    if (std::abs(t_cur) > kBig) {
      t_cur = ComplexValue(std::ldexp(t_cur.real(), -kShift),
                           std::ldexp(t_cur.imag(), -kShift));
      t_hi = ComplexValue(std::ldexp(t_hi.real(), -kShift),
                          std::ldexp(t_hi.imag(), -kShift));
      ++k;
    }
    int idx = j - 1;
    if (idx <= ell) {
      rows[static_cast<std::size_t>(idx)] = t_cur;
      rsc[static_cast<std::size_t>(idx)] = k;
    }
  }
  ComplexValue a0 = p_elementary({0.0, tau, chi});
  ComplexValue a1 = p_elementary({1.0, tau, chi});
  int ia = (std::abs(a0) >= std::abs(a1)) ? 0 : 1;
  ComplexValue anchor = (ia == 0) ? a0 : a1;
  ComplexValue ratio = anchor / rows[static_cast<std::size_t>(ia)];
  int ka = rsc[static_cast<std::size_t>(ia)];
  ComplexValue v = rows[static_cast<std::size_t>(ell)] * ratio;
  int shift = kShift * (rsc[static_cast<std::size_t>(ell)] - ka);
  return ComplexValue(std::ldexp(v.real(), shift), std::ldexp(v.imag(), shift));
}

// ---------------------------------------------------------------------------
// Order ladder
// ---------------------------------------------------------------------------

// Given P^{-1/2-ell} and P^{-1/2-(ell-1)}, produce P^{-1/2-(ell+1)} from
//   [tau^2 + (ell+1)^2] P^{-3/2-ell} = (2 ell+1) coth(chi) P^{-1/2-ell}
//                                      - P^{1/2-ell}.
inline ComplexValue p_recurrence_step(int ell, ComplexValue tau, double chi,
                                      ComplexValue p_ell,
                                      ComplexValue p_ell_minus_1) {
  if (ell < 0) throw UsageError("ladder index must be >= 0");
  if (!(chi > 0.0)) throw UsageError("chi must be positive");
  ComplexValue denom = tau * tau + static_cast<double>(ell + 1) * (ell + 1);
  double scale = std::abs(tau * tau) + static_cast<double>(ell + 1) * (ell + 1);
  if (std::abs(denom) < 1e-12 * (1.0 + scale))
    throw RecurrencePole("ladder pole: tau^2 + (ell+1)^2 = 0");
  double coth = 1.0 / std::tanh(chi);
  return ((2.0 * ell + 1.0) * coth * p_ell - p_ell_minus_1) / denom;
}

// ---------------------------------------------------------------------------
// Integer-order re-expansion of a non-integer order
// ---------------------------------------------------------------------------

namespace detail {

// Solve the small dense system M x = y in place by Gaussian elimination with
// partial pivoting; the solution replaces y.
inline void solve_dense(std::vector<std::vector<long double>>& M,
                        std::vector<long double>& y) {
  int n = static_cast<int>(y.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(static_cast<double>(M[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)])) >
          std::fabs(static_cast<double>(M[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)])))
        piv = r;
    std::swap(M[static_cast<std::size_t>(piv)], M[static_cast<std::size_t>(col)]);
    std::swap(y[static_cast<std::size_t>(piv)], y[static_cast<std::size_t>(col)]);
    long double d = M[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
    if (d == 0.0L) throw NonConvergence("tail-fit system is singular");
    for (int r = col + 1; r < n; ++r) {
      long double f = M[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / d;
      for (int c2 = col; c2 < n; ++c2)
        M[static_cast<std::size_t>(r)][static_cast<std::size_t>(c2)] -=
            f * M[static_cast<std::size_t>(col)][static_cast<std::size_t>(c2)];
      y[static_cast<std::size_t>(r)] -= f * y[static_cast<std::size_t>(col)];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    long double s2 = y[static_cast<std::size_t>(r)];
    for (int c2 = r + 1; c2 < n; ++c2)
      s2 -= M[static_cast<std::size_t>(r)][static_cast<std::size_t>(c2)] *
            y[static_cast<std::size_t>(c2)];
    y[static_cast<std::size_t>(r)] = s2 / M[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
  }
}

}  // namespace detail

// Re-expansion of P^{-1/2-K} for K > -1 over integer orders:
//   P^{-1/2-K} = sum_{n>=0} b_n,
//   b_n = (-1)^n / Gamma(1+K-n) *
//         sum_{l=0}^n (-1)^l tanh^{l-K}(chi) P^{-1/2-l} / (n-l)!.
// At integer K the Gamma factor kills every block past n = K, so the sum
// collapses to finitely many terms.  At non-integer K the inner alternating
// sum cancels down to blocks with a smooth algebraic profile
//   b_n ~ n^{-(K+2)} (c_0 + c_1/n + c_2/n^2 + ...),
// so the outer sum is completed by fitting that profile to the last computed
// blocks and summing it past the truncation point with Hurwitz zetas.  The
// inner cancellation costs n log10(1 + tanh(chi) tanh(chi/2)) digits, so
// blocks run in extended precision and the block count is capped where that
// budget runs out.
inline ComplexValue p_integer_expansion(double K, ComplexValue tau, double chi,
                                        int ell_max,
                                        const QuadSettings& settings = {}) {
  settings.validate();
  if (!(chi > 0.0)) throw UsageError("chi must be positive");
  if (!(K > -1.0)) throw UsageError("re-expansion requires K > -1");
  if (!detail::is_real(tau))
    throw UsageError("re-expansion implemented for real tau");
  if (ell_max < 1 || ell_max > 2000) throw UsageError("ell_max out of range");
  using detail::quad_real;
  bool k_int = detail::is_integer(K);
  int kint = k_int ? static_cast<int>(std::lround(K)) : -1;
  if (k_int && ell_max < kint)
    throw TruncationWarning("integer order needs ell_max >= K blocks");
  // Cancellation budget: keep the relative block noise below ~1e-8.
  double digits_avail = CONICAL_HAVE_QUADMATH ? 25.0 : 10.0;
  double digits_per_n =
      std::log10(1.0 + std::tanh(chi) * std::tanh(0.5 * chi));
  int n_prec = static_cast<int>(std::floor(digits_avail / digits_per_n));
  int n_top = k_int ? std::max(kint, 1) : std::min(ell_max, n_prec);

  // Integer-order rows in extended precision (true values, not log-scaled:
  // the inner sums cancel by factors up to e^{2 sqrt(n_top)}).
  double t = tau.real();
  quad_real qchi = chi;
  quad_real qt = t;
  quad_real t2 = qt * qt;
  quad_real s_val = (t == 0.0) ? qchi : detail::q_sin(qt * qchi) / qt;
  quad_real c_val = detail::q_cos(qt * qchi);
  std::vector<quad_real> rows =
      detail::ladder_rows_quad(t2, s_val, c_val, chi, n_top);

  quad_real th = detail::q_tanh(qchi);
  quad_real lth = detail::q_log(th);
  std::vector<quad_real> W(static_cast<std::size_t>(n_top) + 1);
  std::vector<quad_real> F(static_cast<std::size_t>(n_top) + 1);
  for (int l = 0; l <= n_top; ++l) {
    quad_real sgn = (l % 2 == 0) ? quad_real(1) : quad_real(-1);
    W[static_cast<std::size_t>(l)] =
        sgn * detail::q_exp((quad_real(l) - quad_real(K)) * lth) *
        rows[static_cast<std::size_t>(l)];
  }
  F[0] = 1;
  for (int m = 1; m <= n_top; ++m)
    F[static_cast<std::size_t>(m)] = F[static_cast<std::size_t>(m - 1)] / m;

  // G_n = 1/Gamma(1+K-n), by G_n = G_{n-1} (1+K-n); exactly zero past n = K
  // at integer K.
  SignedLog g0 = log_gamma_real_signed(1.0 + K);
  quad_real G = quad_real(g0.sign) * detail::q_exp(quad_real(-g0.log_abs));

  std::vector<double> blocks;
  blocks.reserve(static_cast<std::size_t>(n_top) + 1);
  double S = 0.0;
  for (int n = 0; n <= n_top; ++n) {
    if (n > 0) G *= quad_real(1) + quad_real(K) - quad_real(n);
    quad_real conv = 0;
    for (int l = 0; l <= n; ++l)
      conv += W[static_cast<std::size_t>(l)] * F[static_cast<std::size_t>(n - l)];
    quad_real b = ((n % 2 == 0) ? quad_real(1) : quad_real(-1)) * G * conv;
    double bd = static_cast<double>(b);
    blocks.push_back(bd);
    S += bd;
    if (k_int && n >= kint) break;
  }
  if (k_int) return ComplexValue(S, 0.0);

  // Tail completion: the relative profile b_n n^{K+2} is a smooth series in
  // 1/n, fitted over the top window as a cubic in x = 1/n (recentered for
  // conditioning), then summed exactly past n_top with Hurwitz zetas.
  int N = n_top;
  if (N < 60)
    throw TruncationWarning("ell_max too small for tail completion");
  constexpr int kOrder = 4;  // c0..c3
  int J = std::min(150, N / 2);
  double xbar = 0.0;
  for (int r = 0; r < J; ++r) xbar += 1.0 / (N - J + 1 + r);
  xbar /= J;
  std::vector<std::array<long double, kOrder>> X(static_cast<std::size_t>(J));
  std::vector<long double> yv(static_cast<std::size_t>(J));
  for (int r = 0; r < J; ++r) {
    int n = N - J + 1 + r;
    long double u = 1.0L / n - static_cast<long double>(xbar);
    long double pw = 1.0L;
    for (int c = 0; c < kOrder; ++c) {
      X[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = pw;
      pw *= u;
    }
    yv[static_cast<std::size_t>(r)] =
        static_cast<long double>(blocks[static_cast<std::size_t>(n)]) *
        std::pow(static_cast<long double>(n), static_cast<long double>(K) + 2.0L);
  }
  std::array<long double, kOrder> norm{};
  for (int c = 0; c < kOrder; ++c) {
    long double s2 = 0;
    for (int r = 0; r < J; ++r)
      s2 += X[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] *
            X[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    norm[static_cast<std::size_t>(c)] = std::sqrt(s2);
    if (norm[static_cast<std::size_t>(c)] == 0.0L)
      throw NonConvergence("tail-fit basis degenerate");
    for (int r = 0; r < J; ++r)
      X[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] /=
          norm[static_cast<std::size_t>(c)];
  }
  std::vector<std::vector<long double>> M(
      kOrder, std::vector<long double>(kOrder, 0.0L));
  std::vector<long double> rhs(kOrder, 0.0L);
  for (int r = 0; r < J; ++r)
    for (int a = 0; a < kOrder; ++a) {
      for (int bcol = 0; bcol < kOrder; ++bcol)
        M[static_cast<std::size_t>(a)][static_cast<std::size_t>(bcol)] +=
            X[static_cast<std::size_t>(r)][static_cast<std::size_t>(a)] *
            X[static_cast<std::size_t>(r)][static_cast<std::size_t>(bcol)];
      rhs[static_cast<std::size_t>(a)] +=
          X[static_cast<std::size_t>(r)][static_cast<std::size_t>(a)] *
          yv[static_cast<std::size_t>(r)];
    }
  detail::solve_dense(M, rhs);
  // Recentred cubic d_k (x - xbar)^k  ->  plain coefficients c_j x^j.
  long double d[kOrder];
  for (int c = 0; c < kOrder; ++c)
    d[c] = rhs[static_cast<std::size_t>(c)] / norm[static_cast<std::size_t>(c)];
  long double cj[kOrder] = {0.0L, 0.0L, 0.0L, 0.0L};
  {
    long double mb = -static_cast<long double>(xbar);
    // binomial expansion of each (x + mb)^k
    long double binom[kOrder][kOrder] = {{1, 0, 0, 0},
                                         {mb, 1, 0, 0},
                                         {mb * mb, 2 * mb, 1, 0},
                                         {mb * mb * mb, 3 * mb * mb, 3 * mb, 1}};
    for (int k = 0; k < kOrder; ++k)
      for (int j = 0; j <= k; ++j) cj[j] += d[k] * binom[k][j];
  }
  // Fit residual, as the quality measure for the completed sum.
  double rss = 0.0;
  for (int r = 0; r < J; ++r) {
    int n = N - J + 1 + r;
    long double u = 1.0L / n - static_cast<long double>(xbar);
    long double fit = ((d[3] * u + d[2]) * u + d[1]) * u + d[0];
    double res = static_cast<double>(
        static_cast<long double>(blocks[static_cast<std::size_t>(n)]) *
            std::pow(static_cast<long double>(n),
                     static_cast<long double>(K) + 2.0L) -
        fit);
    rss += res * res;
  }
  double rms = std::sqrt(rss / J);

  // sum_{n>N} n^{-(K+2+j)} = zeta(K+2+j, N+1).
  double tail = 0.0;
  for (int j = 0; j < kOrder; ++j)
    tail += static_cast<double>(cj[j]) *
            detail::hurwitz_zeta(K + 2.0 + j, static_cast<double>(N) + 1.0);
  double total = S + tail;
  // The same profile error integrated over the tail.
  double est =
      rms * detail::hurwitz_zeta(K + 2.0, static_cast<double>(N) + 1.0);
  if (est > std::max(settings.rel_tol, 1e-6) * std::abs(total))
    throw TruncationWarning("outer-sum tail estimate exceeds tolerance");
  return ComplexValue(total, 0.0);
}

// ---------------------------------------------------------------------------
// Dispatcher
// ---------------------------------------------------------------------------

// General-purpose evaluator: closed forms for small integer orders, otherwise
// the sinc series (exact finite band at integer K, tail-completed series at
// non-integer K).
inline ComplexValue p_evaluate(const ConicalPoint& point,
                               const QuadSettings& settings = {}) {
  point.validate();
  double K = point.K;
  if (detail::is_integer(K) && (K == -1.0 || K == 0.0))
    return p_elementary(point);
  auto table = shared_table(K, point.chi, 48, settings);
  return p_sinc_series(point, *table);
}

}  // namespace conical

#pragma once

// Expansion coefficients R^K_n and offset coefficients Rtilde^K_n for the
// sinc-series representations of the conical functions.
//
// Both families derive from the weight w(omega) = (1 - cos(omega)/cosh(chi))^K:
//   * R^K_n   = C(K,chi) * a_n, where a_n are the Fourier cosine coefficients
//     of w on [0, 2pi].  a_n decays like e^{-|n| chi} n^{-K-1}, so the table
//     stores the scaled values rho_n = a_n e^{n chi}, which stay O(n^{-K-1}).
//   * Rtilde^K_n = prefQ(K,chi) * d_n, where d_n are the Taylor coefficients
//     of (1 - 2 cosh(chi) u + u^2)^K.  d_n grows like e^{n chi} n^{-K-1}; the
//     table stores etilde_n = d_n e^{-n chi}.
//
// Recurrences (from (cosh chi - cos omega) w' = K sin(omega) w and the
// analogous relation for the quadratic branch factor):
//   (n+1+K) a_{n+1} = 2 n cosh(chi) a_n - (n-1-K) a_{n-1}
//   (n+1) d_{n+1}   = 2 cosh(chi) (n-K) d_n - (n-1-2K) d_{n-1}
// a_n is the minimal solution of its recurrence (computed by downward
// recursion with sum normalization); d_n is dominant (upward is stable).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "numeric.hpp"
#include "types.hpp"

namespace conical {

namespace detail {

inline bool is_integer(double x) {
  return std::isfinite(x) && x == std::floor(x);
}

// Prefactor C(K,chi) multiplying the Fourier coefficients a_n.
inline double r_prefactor(double K, double chi) {
  double g = reciprocal_gamma_real(1.0 + K);
  if (g == 0.0) throw PoleOfGamma("gamma(1+K) pole in coefficient prefactor");
  return std::pow(2.0 * kPi, -0.5) * std::pow(std::sinh(chi), -0.5) *
         std::pow(std::tanh(chi), -K) * g;
}

// Prefactor multiplying the Taylor coefficients d_n.
inline ComplexValue rtilde_prefactor(double K, double chi) {
  double g = reciprocal_gamma_real(1.0 + K);
  if (g == 0.0) throw PoleOfGamma("gamma(1+K) pole in coefficient prefactor");
  ComplexValue phase = std::exp(ComplexValue(0.0, -K * kPi));
  return ComplexValue(0.0, -1.0) * phase * std::sqrt(kPi / 2.0) *
         std::pow(std::sinh(chi), -K - 0.5) * std::pow(2.0, -K) * g;
}

// Exact banded Fourier coefficients for integer K = ell >= 0:
// a_n = sum_{m >= |n|, m = |n| mod 2}^{ell} C(ell,m) (-1/cosh chi)^m 2^{-m}
//       C(m, (m+|n|)/2).
inline std::vector<double> integer_band_a(int ell, double chi) {
  std::vector<double> a(static_cast<std::size_t>(ell) + 1, 0.0);
  double inv_c = 1.0 / std::cosh(chi);
  for (int n = 0; n <= ell; ++n) {
    double sum = 0.0;
    for (int m = n; m <= ell; m += 2) {
      double term = binom_real(static_cast<double>(ell), m) *
                    std::pow(-0.5 * inv_c, m) *
                    binom_real(static_cast<double>(m), (m + n) / 2);
      sum += term;
    }
    a[static_cast<std::size_t>(n)] = sum;
  }
  return a;
}

// Downward (minimal-solution) recursion for rho_n = a_n e^{n chi},
// normalized by sum_n a_n = w(0) = (1 - sech chi)^K.
inline std::vector<double> miller_rho(double K, double chi, int n_top) {
  int buffer = static_cast<int>(std::ceil(21.0 / chi)) + 8;
  int start = n_top + buffer;
  std::vector<double> rho(static_cast<std::size_t>(start) + 2, 0.0);
  rho[static_cast<std::size_t>(start) + 1] = 0.0;
  rho[static_cast<std::size_t>(start)] = 1.0;
  double em1 = std::exp(-chi);
  double em2 = em1 * em1;
  double two_c = 2.0 * std::cosh(chi);
  for (int n = start; n >= 1; --n) {
    double num = two_c * n * em1 * rho[static_cast<std::size_t>(n)] -
                 (n + 1.0 + K) * em2 * rho[static_cast<std::size_t>(n) + 1];
    rho[static_cast<std::size_t>(n) - 1] = num / (n - 1.0 - K);
  }
  // Normalization: rho_0 + 2 sum_{n>=1} rho_n e^{-n chi} = (1 - sech chi)^K.
  DDAccumulator acc;
  acc.add(rho[0]);
  for (int n = 1; n <= start; ++n) {
    double w = std::exp(-n * chi);
    if (w == 0.0) break;
    acc.add(2.0 * rho[static_cast<std::size_t>(n)] * w);
  }
  double target = std::pow(1.0 - 1.0 / std::cosh(chi), K);
  double sum = acc.sum();
  if (sum == 0.0 || !std::isfinite(sum))
    throw NonConvergence("coefficient recursion normalization failed");
  double lambda = target / sum;
  rho.resize(static_cast<std::size_t>(n_top) + 1);
  for (double& v : rho) v *= lambda;
  return rho;
}

// etilde_n = d_n e^{-n chi} (dominant solution; upward recursion is stable).
// For integer K >= 0 the quadratic factors exactly,
//   (1 - 2 cosh(chi) u + u^2)^K = (1 - e^chi u)^K (1 - e^{-chi} u)^K,
// so the band is the all-positive convolution
//   etilde_n = (-1)^n sum_i C(K, n-i) C(K, i) e^{-2 i chi},
// which avoids the recursion's near-band-edge cancellation at large K.
inline std::vector<double> etilde_array(double K, double chi, int n_top) {
  std::vector<double> e(static_cast<std::size_t>(n_top) + 1, 0.0);
  if (is_integer(K) && K >= 0.0) {
    int k = static_cast<int>(std::lround(K));
    std::vector<double> bin(static_cast<std::size_t>(k) + 1);
    bin[0] = 1.0;
    for (int j = 1; j <= k; ++j)
      bin[static_cast<std::size_t>(j)] =
          bin[static_cast<std::size_t>(j) - 1] * (k - j + 1) / j;
    double em2 = std::exp(-2.0 * chi);
    for (int n = 0; n <= std::min(2 * k, n_top); ++n) {
      double sum = 0.0;
      double w = std::pow(em2, std::max(0, n - k));
      for (int i = std::max(0, n - k); i <= std::min(k, n); ++i) {
        sum += bin[static_cast<std::size_t>(n - i)] *
               bin[static_cast<std::size_t>(i)] * w;
        w *= em2;
      }
      e[static_cast<std::size_t>(n)] = (n % 2 == 0) ? sum : -sum;
    }
    return e;
  }
  double c = std::cosh(chi);
  double em1 = std::exp(-chi);
  double em2 = em1 * em1;
  e[0] = 1.0;
  if (n_top >= 1) e[1] = -2.0 * K * c * em1;
  for (int n = 1; n < n_top; ++n) {
    e[static_cast<std::size_t>(n) + 1] =
        (2.0 * c * (n - K) * e[static_cast<std::size_t>(n)] * em1 -
         (n - 1.0 - 2.0 * K) * e[static_cast<std::size_t>(n) - 1] * em2) /
        (n + 1.0);
  }
  return e;
}

// Four-term large-n asymptotic of rho_n, from the branch point of the weight:
// rho_n ~ -(sin K pi / pi) tanh^K(chi) sum_j c_j Gamma(K+1+j) n^{-K-1-j}.
inline double rho_asym(double K, double chi, double n) {
  double alpha = 0.5 / std::tanh(chi);
  double beta = 1.0 / 6.0;
  double gamma_c = std::tanh(chi);  // re-used below as coth/24
  gamma_c = 1.0 / (24.0 * gamma_c);
  double c0 = 1.0;
  double c1 = K * alpha;
  double c2 = K * beta + 0.5 * K * (K - 1.0) * alpha * alpha;
  double c3 = K * gamma_c + K * (K - 1.0) * alpha * beta +
              K * (K - 1.0) * (K - 2.0) * alpha * alpha * alpha / 6.0;
  double s = 0.0;
  double cj[4] = {c0, c1, c2, c3};
  for (int j = 0; j < 4; ++j)
    s += cj[j] * std::tgamma(K + 1.0 + j) * std::pow(n, -(K + 1.0 + j));
  return -(std::sin(K * kPi) / kPi) * std::pow(std::tanh(chi), K) * s;
}

// Darboux asymptotic of etilde_n from the near singularity of
// (1-v)^K (1 - v e^{-2 chi})^K:  etilde_n ~ sum_j h_j [v^n](1-v)^{K+j}.
struct EtildeAsym {
  double h[7];
  double K;
  double eval(double n) const {
    double s = 0.0;
    for (int jj = 0; jj < 7; ++jj) {
      double a = -K - jj;  // exponent: [v^n](1-v)^{K+jj} = G(n-K-jj)/(G(-K-jj) n!)
      SignedLog gden = log_gamma_real_signed(a);
      if (!std::isfinite(gden.log_abs)) continue;  // 1/Gamma at pole -> 0
      double lg = std::lgamma(n - K - jj) - std::lgamma(n + 1.0) - gden.log_abs;
      s += h[jj] * gden.sign * std::exp(lg);
    }
    return s;
  }
};

inline EtildeAsym etilde_asym_make(double K, double chi) {
  EtildeAsym out;
  out.K = K;
  double em2 = std::exp(-2.0 * chi);
  double base = std::pow(1.0 - em2, K);
  double q = em2 / (1.0 - em2);
  for (int jj = 0; jj < 7; ++jj)
    out.h[jj] = base * binom_real(K, jj) * std::pow(q, jj);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Coefficient table
// ---------------------------------------------------------------------------

struct CoeffTable {
  double K = 0.0;
  double chi = 1.0;
  int n_min = 0;
  int n_max = 0;
  // R^K_n for n in [n_min, n_max]; index n - n_min.  Symmetric: R_n = R_{-n}.
  std::vector<double> values;
  // Rtilde^K_n for n in [0, offset_count()-1]; truncated to the range
  // representable in double (the coefficients grow like e^{n chi}).
  std::vector<ComplexValue> offset_values;

  // Scaled internals used by the series evaluators (full accuracy range):
  // rho_scaled[n]    = a_n e^{n chi}          (n = 0..internal_max)
  // etilde_scaled[n] = d_n e^{-n chi}         (n = 0..internal_max)
  std::vector<double> rho_scaled;
  std::vector<double> etilde_scaled;
  double c_pref = 0.0;        // C(K, chi)
  ComplexValue q_pref{0, 0};  // prefactor of the d_n side
  int internal_max = 0;
  bool raise_order = false;  // K = -1: degenerate representation, see below

  double value_at(int n) const {
    int a = std::abs(n);
    if (a > n_max) throw BandViolation("coefficient index out of table range");
    return values[static_cast<std::size_t>(n - n_min)];
  }
  std::size_t offset_count() const { return offset_values.size(); }
};

namespace detail {

inline void fill_public_arrays(CoeffTable& t) {
  t.values.assign(static_cast<std::size_t>(2 * t.n_max + 1), 0.0);
  for (int n = 0; n <= t.n_max; ++n) {
    double a_n = (n < static_cast<int>(t.rho_scaled.size()))
                     ? t.rho_scaled[static_cast<std::size_t>(n)] *
                           std::exp(-n * t.chi)
                     : 0.0;
    double v = t.c_pref * a_n;
    t.values[static_cast<std::size_t>(t.n_max + n)] = v;
    t.values[static_cast<std::size_t>(t.n_max - n)] = v;
  }
  t.offset_values.clear();
  double lq = std::log(std::abs(t.q_pref));
  for (int n = 0; n <= t.n_max; ++n) {
    double et = (n < static_cast<int>(t.etilde_scaled.size()))
                    ? t.etilde_scaled[static_cast<std::size_t>(n)]
                    : 0.0;
    double lmag = (et == 0.0) ? -1e30 : lq + std::log(std::abs(et)) + n * t.chi;
    if (lmag > 690.0) break;  // beyond double range; truncate public array
    t.offset_values.push_back(t.q_pref * et * std::exp(n * t.chi));
  }
}

}  // namespace detail

// Build the coefficient table for order K at argument chi.
//
// Throws BandViolation if the integer-K band structure fails its internal
// cross-check, NonConvergence if the recursions cannot be validated against
// their large-n asymptotics, PoleOfGamma for K = -1 prefactor poles (the
// K = -1 table is handled by the order-raising flag instead).
inline CoeffTable build_table(double K, double chi, int n_max,
                              const QuadSettings& settings = {}) {
  settings.validate();
  if (!(chi > 0.0)) throw UsageError("chi must be positive");
  if (n_max < 0) throw UsageError("n_max must be nonnegative");
  if (K <= -1.0 && !(detail::is_integer(K) && K == -1.0))
    throw UsageError("order K must satisfy K > -1 (or K = -1 exactly)");

  CoeffTable t;
  t.K = K;
  t.chi = chi;
  t.n_min = -n_max;
  t.n_max = n_max;
  // The internal range must reach into the asymptotic regime of the
  // coefficients (expansion parameter ~ coth(chi)/(2n)), so extend it for
  // small chi.
  // The floor of 400 keeps the large-n model's switchover error (relative
  // size ~ (coth(chi)/2n)^4 at the first modelled index) below 1e-12 for the
  // series tails; the recursion itself is O(internal_max) in doubles.
  int asym_reach = static_cast<int>(std::ceil(12.0 / chi));
  t.internal_max = std::min(20000, std::max({n_max, 400, asym_reach}));

  if (detail::is_integer(K) && K == -1.0) {
    // Degenerate representation: every coefficient carries 1/Gamma(0) = 0.
    // The series evaluators recover this order from the K = 0 series via the
    // exact order-raising connection; the table records the flag and the
    // K = 0 scaled data.
    CoeffTable base = build_table(0.0, chi, n_max, settings);
    base.K = -1.0;
    base.raise_order = true;
    std::fill(base.values.begin(), base.values.end(), 0.0);
    std::fill(base.offset_values.begin(), base.offset_values.end(),
              ComplexValue(0.0, 0.0));
    return base;
  }

  t.c_pref = detail::r_prefactor(K, chi);
  t.q_pref = detail::rtilde_prefactor(K, chi);
  t.etilde_scaled = detail::etilde_array(K, chi, t.internal_max);

  if (detail::is_integer(K)) {
    int ell = static_cast<int>(std::lround(K));
    std::vector<double> a = detail::integer_band_a(ell, chi);
    t.rho_scaled.assign(static_cast<std::size_t>(t.internal_max) + 1, 0.0);
    for (int n = 0; n <= std::min(ell, t.internal_max); ++n)
      t.rho_scaled[static_cast<std::size_t>(n)] =
          a[static_cast<std::size_t>(n)] * std::exp(n * chi);
    // Cross-check the two coefficient engines against each other inside the
    // band: i * prefQ * d_n = pi * C * a_{|n-ell|} must hold exactly.
    for (int n = 0; n <= std::min(2 * ell, t.internal_max); ++n) {
      ComplexValue lhs = ComplexValue(0.0, 1.0) * t.q_pref *
                         t.etilde_scaled[static_cast<std::size_t>(n)] *
                         std::exp(n * chi);
      int m = std::abs(n - ell);
      double rhs =
          (m <= ell) ? kPi * t.c_pref * a[static_cast<std::size_t>(m)] : 0.0;
      double scale = std::max(std::abs(rhs), 1e-300);
      if (std::abs(lhs - rhs) > 1e-8 * scale + 1e-280)
        throw BandViolation("integer-order coefficient cross-check failed");
    }
  } else {
    t.rho_scaled = detail::miller_rho(K, chi, t.internal_max);
    // Validate the downward recursion + normalization against the
    // independent large-n asymptotic form at the top of the range.
    double n_chk = t.internal_max;
    double asym = detail::rho_asym(K, chi, n_chk);
    double got = t.rho_scaled[static_cast<std::size_t>(t.internal_max)];
    if (std::abs(asym) > 1e-280 &&
        std::abs(got - asym) > 2e-2 * std::abs(asym))
      throw NonConvergence("coefficient recursion disagrees with asymptotics");
    // Same validation on the upward side.
    detail::EtildeAsym ea = detail::etilde_asym_make(K, chi);
    double easym = ea.eval(n_chk);
    double egot = t.etilde_scaled[static_cast<std::size_t>(t.internal_max)];
    if (std::abs(easym) > 1e-280 &&
        std::abs(egot - easym) > 2e-2 * std::abs(easym))
      throw NonConvergence("branch-factor recursion disagrees with asymptotics");
  }

  detail::fill_public_arrays(t);
  return t;
}

// ---------------------------------------------------------------------------
// Literal quadrature forms of the individual coefficients
// ---------------------------------------------------------------------------

// R^K_n for real (possibly non-integer) index n, from its defining integral
//   R^K_n = C(K,chi) (1/2pi) int_0^{2pi} (1 - cos w / cosh chi)^K e^{i n w} dw.
// Integer n returns a real value (the imaginary part, <= 1e-13 relative, is
// dropped); non-integer n returns the full complex value.
inline ComplexValue r_coeff(double K, double n, double chi,
                            const QuadSettings& settings = {}) {
  settings.validate();
  if (!(chi > 0.0)) throw UsageError("chi must be positive");
  double pref = detail::r_prefactor(K, chi);
  double inv_c = 1.0 / std::cosh(chi);
  auto f = [&](double w) -> ComplexValue {
    return std::pow(1.0 - std::cos(w) * inv_c, K) *
           std::exp(ComplexValue(0.0, n * w));
  };
  QuadResult q;
  if (detail::is_integer(n)) {
    q = quad_periodic(f, settings);
  } else {
    q = quad_finite(f, 0.0, 2.0 * kPi, settings);
  }
  ComplexValue val = pref / (2.0 * kPi) * q.value;
  if (detail::is_integer(n)) {
    // The natural size of these coefficients is the prefactor scale; a
    // genuinely vanishing one carries only rounding noise in both parts, so
    // judge the phase against that scale rather than the value alone.
    double scale = std::abs(val) + std::abs(pref);
    if (std::abs(val.imag()) > 1e-10 * scale)
      throw NonConvergence("integer-index coefficient has spurious phase");
    return ComplexValue(val.real(), 0.0);
  }
  return val;
}

// Rtilde^K_n for integer n >= 0, from its defining integral
//   Rtilde^K_n = -(i/2pi) sqrt(pi/2) tanh^{-K}(chi) sinh^{-1/2}(chi)
//                / Gamma(1+K) int_0^{2pi} (1-cos w/cosh chi)^K e^{i(n-K) w} dw.
//
// Note: for non-integer K this literal Fourier-type integral and the Taylor
// coefficients stored in CoeffTable::offset_values are different objects (the
// integrand's complex exponential is not 2pi-periodic, so this integral is
// not a coefficient of the periodic weight).  They coincide for integer K.
inline ComplexValue rtilde_coeff(double K, int n, double chi,
                                 const QuadSettings& settings = {}) {
  settings.validate();
  if (!(chi > 0.0)) throw UsageError("chi must be positive");
  if (n < 0) throw UsageError("offset coefficient index must be >= 0");
  double g = reciprocal_gamma_real(1.0 + K);
  if (g == 0.0) throw PoleOfGamma("gamma(1+K) pole in coefficient prefactor");
  double inv_c = 1.0 / std::cosh(chi);
  double shift = n - K;
  auto f = [&](double w) -> ComplexValue {
    return std::pow(1.0 - std::cos(w) * inv_c, K) *
           std::exp(ComplexValue(0.0, shift * w));
  };
  QuadResult q;
  if (detail::is_integer(K)) {
    q = quad_periodic(f, settings);
  } else {
    q = quad_finite(f, 0.0, 2.0 * kPi, settings);
  }
  ComplexValue pref = ComplexValue(0.0, -1.0) / (2.0 * kPi) *
                      std::sqrt(kPi / 2.0) * std::pow(std::tanh(chi), -K) *
                      std::pow(std::sinh(chi), -0.5) * g;
  return pref * q.value;
}

// ---------------------------------------------------------------------------
// Shared table cache (keyed by exact bit patterns)
// ---------------------------------------------------------------------------

namespace detail {

struct TableKey {
  std::uint64_t k_bits;
  std::uint64_t chi_bits;
  int n_max;
  bool operator<(const TableKey& o) const {
    if (k_bits != o.k_bits) return k_bits < o.k_bits;
    if (chi_bits != o.chi_bits) return chi_bits < o.chi_bits;
    return n_max < o.n_max;
  }
};

inline std::uint64_t double_bits(double x) {
  std::uint64_t b;
  std::memcpy(&b, &x, sizeof b);
  return b;
}

}  // namespace detail

// Build-or-fetch a shared table.  Thread-safe; tables are immutable once
// published.
inline std::shared_ptr<const CoeffTable> shared_table(
    double K, double chi, int n_max, const QuadSettings& settings = {}) {
  static std::mutex mu;
  static std::map<detail::TableKey, std::shared_ptr<const CoeffTable>> cache;
  detail::TableKey key{detail::double_bits(K), detail::double_bits(chi),
                       n_max};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const CoeffTable>(
      build_table(K, chi, n_max, settings));
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(key, built);
  return it->second;
}

}  // namespace conical

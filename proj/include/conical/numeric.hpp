#pragma once
// Shared numeric primitives: complex log-gamma, hypergeometric series,
// quadrature rules, and the removable-singularity sinc evaluator.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "conical/types.hpp"

namespace conical {

// ---------------------------------------------------------------------------
// Compensated (double-double) accumulator: the running sum is held as an
// unevaluated hi+lo pair via two-sum, so long alternating series keep
// roughly twice the working precision in the accumulator.
// ---------------------------------------------------------------------------
struct DDAccumulator {
  double hi = 0.0;
  double lo = 0.0;
  void add(double x) {
    double s = hi + x;
    double bb = s - hi;
    lo += (hi - (s - bb)) + (x - bb);
    hi = s;
  }
  double sum() const { return hi + lo; }
};

namespace detail {

inline bool is_nonpositive_integer(const ComplexValue& z) {
  return z.imag() == 0.0 && z.real() <= 0.0 &&
         z.real() == std::floor(z.real());
}

// log(sin(pi z)) up to an additive multiple of 2*pi*i, stable for large |Im z|.
inline ComplexValue log_sin_pi(const ComplexValue& z) {
  const ComplexValue I(0.0, 1.0);
  const double ln2 = 0.693147180559945309417232121458176568;
  if (z.imag() >= 0.0) {
    // sin(pi z) = e^{-i pi z} (1 - e^{2 pi i z}) * (i/2); log(i/2) has
    // imaginary part +pi/2.
    ComplexValue w = std::exp(2.0 * kPi * I * z);
    return -kPi * I * z + std::log(1.0 - w) -
           ComplexValue(ln2, -0.5 * kPi);
  }
  ComplexValue w = std::exp(-2.0 * kPi * I * z);
  return kPi * I * z + std::log(1.0 - w) - ComplexValue(ln2, 0.5 * kPi);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// log Gamma(z): fixed-coefficient rational (Lanczos) approximation for
// Re z >= 1/2, reflection formula otherwise.  Real on the positive real
// axis; exp(log_gamma_complex(z)) is Gamma(z) everywhere off the poles
// (in the reflected half-plane the imaginary part may differ from the
// principal branch by a multiple of 2*pi, which exponentiation ignores).
// ---------------------------------------------------------------------------
inline ComplexValue log_gamma_complex(ComplexValue z) {
  if (detail::is_nonpositive_integer(z))
    throw PoleOfGamma("log_gamma_complex: z is a non-positive integer");
  static const double g[9] = {
      0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,  12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (z.real() < 0.5) {
    // Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return std::log(ComplexValue(kPi, 0.0)) - detail::log_sin_pi(z) -
           log_gamma_complex(1.0 - z);
  }
  ComplexValue x = z - 1.0;
  ComplexValue a(g[0], 0.0);
  for (int i = 1; i < 9; ++i) a += g[i] / (x + static_cast<double>(i));
  ComplexValue t = x + 7.5;
  const double half_log_two_pi = 0.918938533204672741780329736405617639;
  return half_log_two_pi + (x + 0.5) * std::log(t) - t + std::log(a);
}

// Gamma for real argument as log-magnitude plus sign (handles negatives).
struct SignedLog {
  double log_abs;
  double sign;  // +1 or -1
  double value() const { return sign * std::exp(log_abs); }
};

inline SignedLog log_gamma_real_signed(double x) {
  if (x > 0.0) return {std::lgamma(x), 1.0};
  if (x == std::floor(x))
    throw PoleOfGamma("log_gamma_real_signed: non-positive integer argument");
  // Reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x)).
  double s = std::sin(kPi * x);
  return {std::log(kPi) - std::log(std::abs(s)) - std::lgamma(1.0 - x),
          s > 0.0 ? 1.0 : -1.0};
}

// 1/Gamma(x) for real x; zero at non-positive integers (entire function).
inline double reciprocal_gamma_real(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  SignedLog g = log_gamma_real_signed(x);
  double mag = std::exp(-g.log_abs);
  return g.sign * mag;
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric series 2F1(a,b;c;z), |z| < 1.
// ---------------------------------------------------------------------------
inline ComplexValue hyp2f1(const ComplexValue& a, const ComplexValue& b,
                           const ComplexValue& c, const ComplexValue& z,
                           double rel_tol = 1e-15) {
  if (detail::is_nonpositive_integer(c))
    throw PoleOfGamma("hyp2f1: c is a non-positive integer");
  if (std::abs(z) >= 1.0)
    throw OutsideConvergenceDisk("hyp2f1: |z| >= 1");
  ComplexValue term(1.0, 0.0);
  DDAccumulator sr, si;
  sr.add(1.0);
  const long max_terms = 2000000;
  int calm = 0;
  for (long k = 0; k < max_terms; ++k) {
    double kk = static_cast<double>(k);
    term *= (a + kk) * (b + kk) * z / ((c + kk) * (kk + 1.0));
    sr.add(term.real());
    si.add(term.imag());
    double mag = std::hypot(sr.sum(), si.sum());
    if (std::abs(term) <= rel_tol * std::max(mag, 1e-300)) {
      if (++calm >= 3) return {sr.sum(), si.sum()};
    } else {
      calm = 0;
    }
  }
  throw NonConvergence("hyp2f1: series did not stabilize");
}

// ---------------------------------------------------------------------------
// Kummer confluent series 1F1(a;c;z).  For real negative z with c-a >= 0 the
// Kummer transform 1F1(a;c;z) = e^z 1F1(c-a;c;-z) removes the alternating
// cancellation; otherwise terms are accumulated in double-double.  Accuracy
// degrades for |z| > 700 (the transform's e^z underflows/overflows first).
// ---------------------------------------------------------------------------
inline ComplexValue hyp1f1(const ComplexValue& a, const ComplexValue& c,
                           const ComplexValue& z, double rel_tol = 1e-15) {
  if (detail::is_nonpositive_integer(c))
    throw PoleOfGamma("hyp1f1: c is a non-positive integer");
  if (z.imag() == 0.0 && z.real() < 0.0 && a.imag() == 0.0 &&
      c.imag() == 0.0 && c.real() - a.real() >= 0.0) {
    ComplexValue ca = c - a;
    if (detail::is_nonpositive_integer(ca) || ca == ComplexValue(0.0, 0.0)) {
      // 1F1(-m; c; w) is a finite polynomial; fall through to direct sum.
    } else {
      return std::exp(z) * hyp1f1(ca, c, -z, rel_tol);
    }
  }
  ComplexValue term(1.0, 0.0);
  DDAccumulator sr, si;
  sr.add(1.0);
  const long max_terms = 2000000;
  int calm = 0;
  for (long k = 0; k < max_terms; ++k) {
    double kk = static_cast<double>(k);
    term *= (a + kk) * z / ((c + kk) * (kk + 1.0));
    sr.add(term.real());
    si.add(term.imag());
    double mag = std::hypot(sr.sum(), si.sum());
    if (std::abs(term) <= rel_tol * std::max(mag, 1e-300)) {
      if (++calm >= 3) return {sr.sum(), si.sum()};
    } else {
      calm = 0;
    }
  }
  throw NonConvergence("hyp1f1: series did not stabilize");
}

// ---------------------------------------------------------------------------
// sin((tau - shift) chi) / (tau - shift) with the removable singularity
// handled by an odd Taylor polynomial inside |arg| < 1e-2.
// ---------------------------------------------------------------------------
inline ComplexValue sinc_shifted(const ComplexValue& tau,
                                 const ComplexValue& shift, double chi) {
  if (!(chi > 0.0)) throw UsageError("sinc_shifted: chi must be > 0");
  ComplexValue d = tau - shift;
  ComplexValue x = d * chi;
  if (std::abs(x) < 1e-2) {
    ComplexValue x2 = x * x;
    // chi * (1 - x^2/6 + x^4/120 - x^6/5040); truncation < 1e-18 here.
    return chi * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0)));
  }
  return std::sin(x) / d;
}

// ---------------------------------------------------------------------------
// Trapezoid rule on [0, 2pi) with node doubling: exponentially convergent
// for analytic periodic integrands.
// ---------------------------------------------------------------------------
inline QuadResult quad_periodic(const std::function<ComplexValue(double)>& f,
                                const QuadSettings& settings) {
  settings.validate();
  int n = std::max(16, settings.periodic_points);
  const int cap = 1 << 20;
  const double two_pi = 2.0 * kPi;
  DDAccumulator sr, si;
  for (int j = 0; j < n; ++j) {
    ComplexValue v = f(two_pi * j / n);
    sr.add(v.real());
    si.add(v.imag());
  }
  ComplexValue prev = ComplexValue(sr.sum(), si.sum()) * (two_pi / n);
  while (n < cap) {
    // Double the node count, reusing existing evaluations (new odd nodes).
    for (int j = 0; j < n; ++j) {
      ComplexValue v = f(two_pi * (2 * j + 1) / (2 * n));
      sr.add(v.real());
      si.add(v.imag());
    }
    n *= 2;
    ComplexValue cur = ComplexValue(sr.sum(), si.sum()) * (two_pi / n);
    double err = std::abs(cur - prev);
    if (err <= std::max(settings.abs_tol, settings.rel_tol * std::abs(cur)))
      return {cur, err, true};
    prev = cur;
  }
  throw NonConvergence("quad_periodic: node budget exhausted");
}

namespace detail {

// 15-point Kronrod / 7-point Gauss pair on [-1, 1].
inline constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
inline constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

struct GKPanel {
  ComplexValue integral;
  double error;
  double max_abs;  // largest sampled |f|, for singularity diagnosis
};

inline GKPanel gk15(const std::function<ComplexValue(double)>& f, double a,
                    double b) {
  double h = 0.5 * (b - a);
  double mid = 0.5 * (a + b);
  ComplexValue fk(0.0, 0.0), fg(0.0, 0.0);
  double max_abs = 0.0;
  for (int i = 0; i < 8; ++i) {
    if (i == 7) {
      ComplexValue v = f(mid);
      max_abs = std::max(max_abs, std::abs(v));
      fk += kWgk[7] * v;
      fg += kWg[3] * v;
    } else {
      ComplexValue v1 = f(mid - h * kXgk[i]);
      ComplexValue v2 = f(mid + h * kXgk[i]);
      max_abs = std::max({max_abs, std::abs(v1), std::abs(v2)});
      fk += kWgk[i] * (v1 + v2);
      if (i % 2 == 1) fg += kWg[i / 2] * (v1 + v2);
    }
  }
  ComplexValue gk = fk * h;
  ComplexValue g = fg * h;
  return {gk, std::abs(gk - g), max_abs};
}

struct WorkInterval {
  double a, b;
  GKPanel panel;
  bool operator<(const WorkInterval& o) const {
    return panel.error < o.panel.error;
  }
};

// Adaptive GK15 on [a, b] for a smooth (already desingularized) integrand.
inline QuadResult adaptive_gk(const std::function<ComplexValue(double)>& f,
                              double a, double b,
                              const QuadSettings& settings) {
  std::priority_queue<WorkInterval> heap;
  heap.push({a, b, gk15(f, a, b)});
  ComplexValue total = heap.top().panel.integral;
  double total_err = heap.top().panel.error;
  int splits = 0;
  while (total_err >
             std::max(settings.abs_tol, settings.rel_tol * std::abs(total)) &&
         splits < settings.max_subdivisions) {
    WorkInterval w = heap.top();
    heap.pop();
    double m = 0.5 * (w.a + w.b);
    if (m <= w.a || m >= w.b) {
      // Interval at rounding resolution; accept its current estimate.
      heap.push({w.a, w.b, {w.panel.integral, 0.0, w.panel.max_abs}});
      total_err -= w.panel.error;
      continue;
    }
    GKPanel left = gk15(f, w.a, m);
    GKPanel right = gk15(f, m, w.b);
    total += left.integral + right.integral - w.panel.integral;
    total_err += left.error + right.error - w.panel.error;
    heap.push({w.a, m, left});
    heap.push({m, w.b, right});
    ++splits;
  }
  bool ok = total_err <=
            std::max(settings.abs_tol, settings.rel_tol * std::abs(total));
  if (!ok) {
    // Diagnose: an endpoint singularity with exponent <= -1 shows up as
    // unbounded sampled magnitudes concentrated at the worst interval.
    double worst_mag = heap.top().panel.max_abs;
    if (worst_mag > 1e13)
      throw SingularityTooStrong(
          "quad_finite: integrand appears non-integrable at an endpoint");
    throw NonConvergence("quad_finite: subdivision budget exhausted");
  }
  return {total, total_err, true};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Adaptive finite-interval quadrature.  Branch-point behavior
// f ~ (x-a)^{left_exponent} (or (b-x)^{right_exponent}) at the endpoints is
// removed by the power substitution x = a + t^m with m matched to the
// exponent (m = 2 suffices for exponents > -1/2; steeper exponents in
// (-1, -1/2] get a larger m so the transformed integrand stays bounded).
// ---------------------------------------------------------------------------
inline QuadResult quad_finite(const std::function<ComplexValue(double)>& f,
                              double a, double b, const QuadSettings& settings,
                              double left_exponent = 0.0,
                              double right_exponent = 0.0) {
  settings.validate();
  if (!(a < b)) throw UsageError("quad_finite: requires a < b");
  if (left_exponent <= -1.0 || right_exponent <= -1.0)
    throw SingularityTooStrong("quad_finite: endpoint exponent <= -1");

  auto substitution_power = [](double alpha) -> int {
    if (alpha == 0.0) return 1;
    // Choose m so the transformed integrand behaves like t^{m(1+alpha)-1}
    // with m(1+alpha) >= 4: enough bounded derivatives near t = 0 for the
    // panel rule and its error estimate to stay trustworthy.
    int m = static_cast<int>(std::ceil(4.0 / (1.0 + alpha)));
    return std::max(m, 2);
  };

  double mid = 0.5 * (a + b);
  QuadSettings half = settings;
  half.abs_tol = 0.5 * settings.abs_tol;

  // Integrate one half-interval whose possibly-singular endpoint is s; the
  // substitution x = s + sgn t^m (t in [0, L]) gives, in increasing-x
  // orientation for either sgn,
  //   integral = int_0^L f(s + sgn t^m) m t^{m-1} dt.
  auto integrate_half = [&](double s, double other, double alpha) {
    int m = substitution_power(alpha);
    if (m == 1) {
      return detail::adaptive_gk(f, std::min(s, other), std::max(s, other),
                                 half);
    }
    double sgn = other > s ? 1.0 : -1.0;
    double span = std::abs(other - s);
    double L = std::pow(span, 1.0 / m);
    // Endpoint sliver [s, s +- u0]: below u0 the integrand follows its
    // leading power law f ~ A (x-s)^alpha to machine accuracy, while double
    // sampling of x = s + u quantizes u in half-ulp steps (for alpha < 0
    // the mass inside the very first ulp is far above the tolerance).
    // Integrate the law analytically: A u0^{1+alpha}/(1+alpha) with A
    // calibrated at the exactly-represented offset, i.e. f(x0) u0/(1+alpha).
    double u0 = std::min(1e-10, 0.01 * span);
    double x0 = s + sgn * u0;
    u0 = std::abs(x0 - s);
    ComplexValue model = (u0 > 0.0) ? f(x0) * u0 / (1.0 + alpha)
                                    : ComplexValue(0.0, 0.0);
    double t0 = std::pow(u0, 1.0 / m);
    auto g = [&](double t) -> ComplexValue {
      if (t <= 0.0) return {0.0, 0.0};
      double x = s + sgn * std::pow(t, m);
      if (x == s) return {0.0, 0.0};
      return f(x) * (m * std::pow(t, m - 1));
    };
    QuadResult r = detail::adaptive_gk(g, t0, L, half);
    return QuadResult{r.value + model, r.err_estimate, r.converged};
  };

  QuadResult left = integrate_half(a, mid, left_exponent);
  QuadResult right = integrate_half(b, mid, right_exponent);
  return {left.value + right.value, left.err_estimate + right.err_estimate,
          left.converged && right.converged};
}

// ---------------------------------------------------------------------------
// Semi-infinite oscillatory quadrature: the caller guarantees
// |f(w)| <= C exp(-decay_rate w).  Panels of a few decay lengths are
// integrated adaptively until the analytic tail bound drops below tolerance.
// ---------------------------------------------------------------------------
inline QuadResult quad_semi_infinite_oscillatory(
    const std::function<ComplexValue(double)>& f, double a, double decay_rate,
    const QuadSettings& settings) {
  settings.validate();
  if (!(decay_rate > 0.0))
    throw UsageError("quad_semi_infinite_oscillatory: decay_rate must be > 0");
  const double panel = std::max(1.0, 2.0 / decay_rate);
  QuadSettings inner = settings;
  inner.abs_tol = std::max(1e-300, 0.1 * settings.abs_tol);
  ComplexValue total(0.0, 0.0);
  double err = 0.0;
  double x0 = a;
  double prev_mag = std::numeric_limits<double>::infinity();
  int grow_streak = 0;
  for (int k = 0; k < 400; ++k) {
    double x1 = x0 + panel;
    QuadResult r = detail::adaptive_gk(f, x0, x1, inner);
    total += r.value;
    err += r.err_estimate;
    // Tail bound: sample |f| at the panel end to refresh the constant C.
    double c_end = std::abs(f(x1)) * std::exp(decay_rate * x1);
    double tail = c_end * std::exp(-decay_rate * x1) / decay_rate;
    double mag = std::abs(r.value);
    if (mag > prev_mag * 1.05 && k > 3) {
      if (++grow_streak >= 3)
        throw NonDecayingIntegrand(
            "quad_semi_infinite_oscillatory: panel integrals are growing");
    } else {
      grow_streak = 0;
    }
    prev_mag = std::max(mag, 1e-300);
    if (tail <= std::max(settings.abs_tol,
                         settings.rel_tol * std::abs(total)) &&
        k >= 2) {
      return {total, err + tail, true};
    }
    x0 = x1;
  }
  throw NonConvergence("quad_semi_infinite_oscillatory: panel budget exhausted");
}

namespace detail {

// Hurwitz zeta(s, a) for real s > 1, a > 0 via Euler-Maclaurin; used for
// analytic tail sums of slowly decaying coefficient series.
inline double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0) || !(a > 0.0))
    throw UsageError("hurwitz_zeta: requires s > 1 and a > 0");
  double sum = 0.0;
  int M = 0;
  while (a + M < 16.0) {
    sum += std::pow(a + M, -s);
    ++M;
  }
  double x = a + M;
  sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  // Bernoulli correction terms B_{2j}/(2j)! * (s)_{2j-1} * x^{-s-2j+1}.
  static const double bern[6] = {1.0 / 6,  -1.0 / 30, 1.0 / 42,
                                 -1.0 / 30, 5.0 / 66, -691.0 / 2730};
  double poch = s;           // (s)_1
  double fact = 2.0;         // (2j)!
  double xp = std::pow(x, -s - 1.0);
  for (int j = 1; j <= 6; ++j) {
    sum += bern[j - 1] / fact * poch * xp;
    // advance: (s)_{2j+1} = (s)_{2j-1} (s+2j-1)(s+2j)
    poch *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
    fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    xp /= (x * x);
  }
  return sum;
}

// Generalized binomial coefficient binom(K, j) for real K, integer j >= 0.
inline double binom_real(double K, int j) {
  if (j == 0) return 1.0;
  double v = 1.0;
  for (int i = 0; i < j; ++i) v *= (K - i) / (i + 1.0);
  return v;
}

}  // namespace detail

}  // namespace conical

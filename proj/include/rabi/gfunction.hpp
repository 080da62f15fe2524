#pragma once

// Parity-resolved spectral G-function.
//
// In omega = 1 units, with x = E + g^2, the Bargmann-space eigenvalue problem
// of each parity sector leads to the coefficient recurrence
//
//   m K_m = f_{m-1}(x) K_{m-1} - K_{m-2},   K_0 = 1, K_{-1} = 0,
//   f_k(x) = 2g + (k - x + delta^2 / (x - k)) / (2g),
//
// and the eigenvalues of sector +/- are the zeros of
//
//   G_{+/-}(x) = sum_m K_m(x) g^m (1 -/+ delta / (x - m)).
//
// Everything below works with the scaled terms a_m = K_m g^m, which obey
//
//   a_m = (c_{m-1}(x) a_{m-1} - g^2 a_{m-2}) / m,
//   c_k(x) = g f_k(x) = 2g^2 + (k - x)/2 + delta^2 / (2 (x - k)),
//
// and stay O(1) for small g. Forward recursion follows the dominant solution,
// whose terms eventually shrink by a factor ~1/2 per step.
//
// G_{+/-} has simple poles at x = 0, 1, 2, ...: the factor delta/(x - m)
// contributes one directly and c_n feeds one into every a_m with m > n.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rabi/errors.hpp"
#include "rabi/model.hpp"
#include "rabi/numeric.hpp"

namespace rabi {

inline constexpr double kDefaultSeriesEps = 1e-13;
inline constexpr int kDefaultSeriesCap = 2000;
// Direct evaluation is refused closer than this to a pole.
inline constexpr double kPoleGuard = 1e-6;
inline constexpr int kConvergenceWindow = 5;

struct SeriesCoefficients {
  ScaledEnergy x;
  double coupling = 0.0;      // g in omega = 1 units
  std::vector<double> terms;  // a_m = K_m g^m
  int n_used = 0;
  bool converged = false;
  double tail_estimate = 0.0;

  // Unscaled K_m.
  double coefficient(int m) const { return terms.at(static_cast<std::size_t>(m)) / std::pow(coupling, m); }
};

struct GValue {
  ScaledEnergy x;
  Parity parity = Parity::Plus;
  double value = 0.0;
  int n_used = 0;
  double error_estimate = 0.0;
  double pole_distance = 0.0;
};

// Laurent data of G_{+/-} at x = n: G(n + h) = residue / h + finite_part + O(h).
struct RegularizedG {
  int n = 0;
  Parity parity = Parity::Plus;
  double residue = 0.0;
  double finite_part = 0.0;
  int n_used = 0;
  double error_estimate = 0.0;

  // Offset -residue / finite_part of the eigenvalue closest to the pole, to
  // first order in h. Infinite when the finite part vanishes.
  double root_offset() const {
    if (finite_part == 0.0) return residue == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return -residue / finite_part;
  }
};

namespace detail {

inline void require_coupling(const ModelParams& p) {
  if (!(p.g_scaled() > 0.0)) throw ZeroCoupling();
}

// c_k(x) = g f_k(x).
inline double step_factor(int k, double x, double g, double delta) {
  const double d = x - k;
  return 2.0 * g * g + 0.5 * (k - x) + 0.5 * delta * delta / d;
}

// Streams a_0, a_1, ... for fixed x.
class TermRecurrence {
 public:
  TermRecurrence(double x, double g, double delta) : x_(x), g_(g), delta_(delta) {}

  int index() const noexcept { return m_; }
  double current() const noexcept { return cur_; }

  void advance() {
    const double next = (step_factor(m_, x_, g_, delta_) * cur_ - g_ * g_ * prev_) / (m_ + 1);
    prev_ = cur_;
    cur_ = next;
    ++m_;
  }

 private:
  double x_;
  double g_;
  double delta_;
  int m_ = 0;
  double prev_ = 0.0;
  double cur_ = 1.0;
};

// a_n evaluated at x; needs x outside {0, ..., n - 1}.
inline double term_at(int n, double x, double g, double delta) {
  TermRecurrence rec(x, g, delta);
  while (rec.index() < n) rec.advance();
  return rec.current();
}

// Sliding-window stop rule: `window` consecutive magnitudes each below
// eps times the accumulated magnitude.
class ConvergenceWindow {
 public:
  ConvergenceWindow(double eps, int window) : eps_(eps), window_(window) {}

  bool update(double magnitude, double scale) {
    if (magnitude < eps_ * scale || magnitude == 0.0) {
      ++run_;
      run_sum_ += magnitude;
    } else {
      run_ = 0;
      run_sum_ = 0.0;
    }
    return run_ >= window_;
  }

  // Sum of the magnitudes in the closing window. The scaled terms can change
  // sign and swell again past the stop, so the last term alone understates
  // the tail.
  double window_sum() const noexcept { return run_sum_; }

 private:
  double eps_;
  int window_;
  int run_ = 0;
  double run_sum_ = 0.0;
};

struct SeriesSum {
  double value = 0.0;
  double tail = 0.0;
  double rounding = 0.0;
  int n_used = 0;
};

// Sums G for one sector sign s (+1 Plus, -1 Minus) of the normalized problem.
inline SeriesSum sum_g(double x, double g, double delta, double s, double eps, int n_max) {
  TermRecurrence rec(x, g, delta);
  ConvergenceWindow stop(eps, kConvergenceWindow);
  numeric::CompensatedSum sum;
  double weighted = 0.0;
  for (;;) {
    const int m = rec.index();
    const double t = rec.current() * (1.0 - s * delta / (x - m));
    sum.add(t);
    weighted += (m + 4.0) * std::abs(t);
    if (stop.update(std::abs(t), sum.magnitude())) {
      SeriesSum out;
      out.value = sum.value();
      out.tail = stop.window_sum();
      out.rounding = std::numeric_limits<double>::epsilon() * weighted;
      out.n_used = m + 1;
      return out;
    }
    if (m + 1 >= n_max) throw NonConvergence(n_max);
    rec.advance();
  }
}

// Truncated Laurent expansion p/h + v + s h about x = n. `s` is only
// meaningful while p == 0.
struct Laurent {
  double pole = 0.0;
  double value = 0.0;
  double slope = 0.0;
};

inline Laurent multiply(const Laurent& a, const Laurent& b) {
  Laurent r;
  r.pole = a.pole * b.value + a.value * b.pole;
  r.value = a.value * b.value;
  if (a.pole != 0.0) r.value += a.pole * b.slope;
  if (b.pole != 0.0) r.value += a.slope * b.pole;
  if (r.pole == 0.0) r.slope = a.value * b.slope + a.slope * b.value;
  return r;
}

inline Laurent step_factor_laurent(int k, int n, double g, double delta) {
  const double d2 = delta * delta;
  if (k == n) return Laurent{0.5 * d2, 2.0 * g * g, -0.5};
  const double d = static_cast<double>(n - k);
  return Laurent{0.0, 2.0 * g * g + 0.5 * (k - n) + 0.5 * d2 / d, -0.5 - 0.5 * d2 / (d * d)};
}

inline Laurent weight_laurent(int m, int n, double delta, double s) {
  if (m == n) return Laurent{-s * delta, 1.0, 0.0};
  const double d = static_cast<double>(n - m);
  return Laurent{0.0, 1.0 - s * delta / d, s * delta / (d * d)};
}

}  // namespace detail

// Scaled coefficients a_0..a_N at x with the adaptive stop rule. The stop
// rule uses |a_m| (1 + delta/|x - m|), which bounds the G terms of both
// parities, against the accumulated magnitude of those bounds.
inline SeriesCoefficients recurrence_coeffs(ScaledEnergy x, const ModelParams& params,
                                            double eps = kDefaultSeriesEps,
                                            int n_max = kDefaultSeriesCap) {
  const ModelParams p = validate(params);
  detail::require_coupling(p);
  if (x.x >= 0.0 && x.x == std::round(x.x)) throw PoleProximity(x.x, nearest_pole(x.x));
  const double g = p.g_scaled();
  const double delta = p.delta_scaled();

  SeriesCoefficients out;
  out.x = x;
  out.coupling = g;
  detail::TermRecurrence rec(x.x, g, delta);
  detail::ConvergenceWindow stop(eps, kConvergenceWindow);
  double scale = 0.0;
  for (;;) {
    const int m = rec.index();
    const double a = rec.current();
    out.terms.push_back(a);
    const double bound = std::abs(a) * (1.0 + delta / std::abs(x.x - m));
    scale += bound;
    if (stop.update(bound, scale)) {
      out.converged = true;
      out.n_used = m + 1;
      out.tail_estimate = 2.0 * bound;
      return out;
    }
    if (m + 1 >= n_max) throw NonConvergence(n_max);
    rec.advance();
  }
}

inline GValue g_eval(Parity parity, ScaledEnergy x, const ModelParams& params,
                     double eps = kDefaultSeriesEps, int n_max = kDefaultSeriesCap) {
  const ModelParams p = validate(params);
  detail::require_coupling(p);
  const double dist = pole_distance(x.x);
  if (dist <= kPoleGuard) throw PoleProximity(x.x, nearest_pole(x.x));

  const double s = sign_of(sector(p, parity));
  const detail::SeriesSum sum = detail::sum_g(x.x, p.g_scaled(), p.delta_scaled(), s, eps, n_max);

  GValue out;
  out.x = x;
  out.parity = parity;
  out.value = sum.value;
  out.n_used = sum.n_used;
  out.error_estimate = sum.tail + sum.rounding;
  out.pole_distance = dist;
  return out;
}

// Residue and finite part at x = n, obtained by carrying the 1/(x - n)
// coefficient of every a_m through the recurrence next to its regular part.
inline RegularizedG g_eval_regularized(int n, Parity parity, const ModelParams& params,
                                       double eps = kDefaultSeriesEps,
                                       int n_max = kDefaultSeriesCap) {
  if (n < 0) throw Error("baseline index must be >= 0");
  const ModelParams p = validate(params);
  detail::require_coupling(p);
  const double g = p.g_scaled();
  const double delta = p.delta_scaled();
  const double s = sign_of(sector(p, parity));

  using detail::Laurent;
  Laurent prev{};
  Laurent cur{0.0, 1.0, 0.0};
  numeric::CompensatedSum residue;
  numeric::CompensatedSum finite;
  detail::ConvergenceWindow stop(eps, kConvergenceWindow);
  double weighted = 0.0;

  for (int m = 0;; ++m) {
    const Laurent term = detail::multiply(cur, detail::weight_laurent(m, n, delta, s));
    residue.add(term.pole);
    finite.add(term.value);
    const double mag = std::abs(term.pole) + std::abs(term.value);
    weighted += (m + 4.0) * mag;
    if (m > n && stop.update(mag, residue.magnitude() + finite.magnitude())) {
      RegularizedG out;
      out.n = n;
      out.parity = parity;
      out.residue = residue.value();
      out.finite_part = finite.value();
      out.n_used = m + 1;
      out.error_estimate = stop.window_sum() + std::numeric_limits<double>::epsilon() * weighted;
      return out;
    }
    if (m + 1 >= n_max) throw NonConvergence(n_max);

    const Laurent fc = detail::multiply(detail::step_factor_laurent(m, n, g, delta), cur);
    Laurent next;
    next.pole = (fc.pole - g * g * prev.pole) / (m + 1);
    next.value = (fc.value - g * g * prev.value) / (m + 1);
    next.slope = next.pole == 0.0 ? (fc.slope - g * g * prev.slope) / (m + 1) : 0.0;
    prev = cur;
    cur = next;
  }
}

// Central difference with step h = max(1e-6, 1e-6 |x|).
template <class F>
double central_difference(F&& f, double x) {
  const double h = std::max(1e-6, 1e-6 * std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// dG/dx by central differences; for multiplicity heuristics only.
inline double g_derivative(Parity parity, ScaledEnergy x, const ModelParams& params,
                           double eps = kDefaultSeriesEps) {
  const double h = std::max(1e-6, 1e-6 * std::abs(x.x));
  if (pole_distance(x.x) <= kPoleGuard + h) {
    throw PoleProximity(x.x, nearest_pole(x.x));
  }
  return central_difference(
      [&](double t) { return g_eval(parity, ScaledEnergy{t}, params, eps).value; }, x.x);
}

}  // namespace rabi

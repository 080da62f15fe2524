#pragma once

// Exceptional eigenvalues sit on a baseline x = n, where G_{+/-} has a pole.
// Near x = n every a_m with m > n carries a pole proportional to K_n(n), so
//
//   Res_{x=n} G_{+/-} = K_n(n) g^n C_{+/-}(n)
//
// with K_n(n) polynomial in (g^2, delta^2) and C_{+/-} a convergent series.
//
//   * K_n(n) = 0: the pole vanishes in both sectors and x = n is a doubly
//     degenerate (Juddean) eigenvalue.
//   * C_{+/-}(n) = 0 with K_n(n) != 0: the pole vanishes in one sector only and
//     x = n is a nondegenerate (non-Juddean) eigenvalue of that parity.
//
// Candidates from either condition are accepted only after the truncated-Fock
// oracle confirms them.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rabi/errors.hpp"
#include "rabi/gfunction.hpp"
#include "rabi/model.hpp"
#include "rabi/numeric.hpp"
#include "rabi/oracle.hpp"

namespace rabi {

inline constexpr double kJuddGapThreshold = 1e-8;         // times omega
inline constexpr double kNonJuddSameGapThreshold = 1e-7;  // times omega
inline constexpr double kNonJuddOtherGapFloor = 1e-3;     // times omega
inline constexpr double kJuddDisjointness = 1e-4;         // in g
inline constexpr double kOracleGapTol = 1e-11;            // oracle convergence, times omega
inline constexpr int kDefaultCouplingGrid = 400;

struct CouplingRange {
  double lo = 0.05;
  double hi = 3.0;
};

struct JuddPoint {
  int n = 0;
  double g_star = 0.0;
  double delta = 0.0;
  double residual = 0.0;
  double oracle_gap = 0.0;  // larger of the two parity gaps
  int multiplicity = 1;
  bool accepted = false;
  std::string note;
};

struct NonJuddeanPoint {
  int n = 0;
  Parity parity = Parity::Plus;
  double g_star = 0.0;
  double delta = 0.0;
  double condition_residual = 0.0;
  double oracle_gap_same_parity = 0.0;
  double oracle_gap_other_parity = 0.0;
  int multiplicity = 1;
  bool accepted = false;
  std::string note;
};

template <class Point>
struct ExceptionalSearch {
  std::vector<Point> points;    // accepted, ascending in g_star
  std::vector<Point> rejected;  // tangential or failed the oracle check
};

enum class Verdict { NotExceptional, Juddean, NonJuddeanPlus, NonJuddeanMinus };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::NotExceptional: return "not_exceptional";
    case Verdict::Juddean: return "juddean";
    case Verdict::NonJuddeanPlus: return "nonjuddean_plus";
    case Verdict::NonJuddeanMinus: return "nonjuddean_minus";
  }
  return "?";
}

inline Verdict parse_verdict(const std::string& s) {
  for (Verdict v : {Verdict::NotExceptional, Verdict::Juddean, Verdict::NonJuddeanPlus, Verdict::NonJuddeanMinus}) {
    if (s == to_string(v)) return v;
  }
  throw Error("unknown verdict '" + s + "'");
}

inline Verdict nonjuddean_verdict(Parity p) {
  return p == Parity::Plus ? Verdict::NonJuddeanPlus : Verdict::NonJuddeanMinus;
}

struct ExceptionalEvidence {
  double judd_constraint = 0.0;
  double condition_plus = std::numeric_limits<double>::quiet_NaN();
  double condition_minus = std::numeric_limits<double>::quiet_NaN();
  // |x - n| of the nearest eigenvalue per parity, to first order.
  double offset_plus = std::numeric_limits<double>::quiet_NaN();
  double offset_minus = std::numeric_limits<double>::quiet_NaN();
  bool oracle_checked = false;
  double gap_plus = std::numeric_limits<double>::quiet_NaN();
  double gap_minus = std::numeric_limits<double>::quiet_NaN();
};

struct ExceptionalClassification {
  int n = 0;
  Verdict verdict = Verdict::NotExceptional;
  ExceptionalEvidence evidence;
};

// delta * n! (2g)^n K_n(n) in omega = 1 units: the constraint polynomial
// scaled by delta, so that the globally degenerate delta = 0 line is part of
// its zero set. Zeros in g at fixed delta > 0 are the Juddean points.
inline double judd_constraint(int n, const ModelParams& params) {
  if (n < 0) throw Error("baseline index must be >= 0");
  const ModelParams p = validate(params);
  detail::require_coupling(p);
  const double g = p.g_scaled();
  const double delta = p.delta_scaled();
  double scale = 1.0;
  for (int k = 1; k <= n; ++k) scale *= 2.0 * k;
  return delta * scale * detail::term_at(n, static_cast<double>(n), g, delta);
}

// C_{+/-}(n): the residue of G_{+/-} at x = n divided by K_n(n) g^n.
//
//   C = -s delta + delta^2 / (2 (n + 1)) sum_{m > n} l_m (1 - s delta / (n - m)),
//   l_n = 0, l_{n+1} = 1, m l_m = c_{m-1}(n) l_{m-1} - g^2 l_{m-2}.
inline double nonjuddean_condition(int n, Parity parity, const ModelParams& params,
                                   double eps = kDefaultSeriesEps, int n_max = kDefaultSeriesCap) {
  if (n < 0) throw Error("baseline index must be >= 0");
  const ModelParams p = validate(params);
  detail::require_coupling(p);
  if (p.delta == 0.0) throw DegenerateCase("non-Juddean condition is degenerate at delta == 0");
  const double g = p.g_scaled();
  const double delta = p.delta_scaled();
  const double s = sign_of(sector(p, parity));
  const double x = static_cast<double>(n);

  numeric::CompensatedSum sum;
  detail::ConvergenceWindow stop(eps, kConvergenceWindow);
  double prev = 0.0;
  double cur = 1.0;
  for (int m = n + 1;; ++m) {
    const double t = cur * (1.0 - s * delta / (x - m));
    sum.add(t);
    if (stop.update(std::abs(t), sum.magnitude())) break;
    if (m + 1 - n >= n_max) throw NonConvergence(n_max);
    const double next = (detail::step_factor(m, x, g, delta) * cur - g * g * prev) / (m + 1);
    prev = cur;
    cur = next;
  }
  return -s * delta + delta * delta / (2.0 * (n + 1)) * sum.value();
}

namespace detail {

inline void require_isolated(double delta) {
  if (delta == 0.0) throw DegenerateCase("delta == 0 is degenerate at every baseline; no isolated points");
}

inline void require_range(const CouplingRange& r, double tol) {
  if (!(r.lo > 0.0) || !(r.hi > r.lo) || !std::isfinite(r.hi)) throw InvalidParameter("g_range", r.lo);
  if (!(tol > 0.0)) throw InvalidParameter("tol", tol);
}

inline numeric::ScanSettings coupling_scan(int grid, double tol) {
  numeric::ScanSettings cfg;
  cfg.points = grid;
  cfg.tol = tol;
  return cfg;
}

}  // namespace detail

// Juddean points at baseline n along g at fixed delta (omega = 1).
inline ExceptionalSearch<JuddPoint> find_judd_points(int n, double delta, CouplingRange range,
                                                     double tol = 1e-10,
                                                     int grid = kDefaultCouplingGrid) {
  detail::require_range(range, tol);
  detail::require_isolated(delta);
  auto constraint = [&](double g) { return judd_constraint(n, ModelParams{1.0, g, delta}); };
  const numeric::ScanResult scan = numeric::scan_for_roots(constraint, range.lo, range.hi, detail::coupling_scan(grid, tol));

  ExceptionalSearch<JuddPoint> out;
  for (const numeric::ScanRoot& root : scan.roots) {
    JuddPoint pt;
    pt.n = n;
    pt.g_star = root.x;
    pt.delta = delta;
    pt.residual = std::abs(constraint(root.x));
    const ModelParams p{1.0, root.x, delta};
    const DegeneracyGap gap = degeneracy_gap(p, baseline_energy(n, p), kOracleGapTol);
    pt.oracle_gap = std::max(gap.plus, gap.minus);
    pt.accepted = pt.oracle_gap <= kJuddGapThreshold;
    if (pt.accepted) {
      out.points.push_back(pt);
    } else {
      pt.note = "oracle gap above threshold";
      out.rejected.push_back(pt);
    }
  }
  for (const numeric::ScanDip& dip : scan.unresolved) {
    JuddPoint pt;
    pt.n = n;
    pt.g_star = dip.x;
    pt.delta = delta;
    pt.residual = std::abs(dip.value);
    pt.multiplicity = 2;
    pt.note = "tangential zero";
    out.rejected.push_back(pt);
  }
  return out;
}

// Non-Juddean points of one parity at baseline n along g at fixed delta.
inline ExceptionalSearch<NonJuddeanPoint> find_nonjuddean_points(int n, Parity parity, double delta,
                                                                 CouplingRange range, double tol = 1e-10,
                                                                 int grid = kDefaultCouplingGrid) {
  detail::require_range(range, tol);
  detail::require_isolated(delta);
  auto condition = [&](double g) { return nonjuddean_condition(n, parity, ModelParams{1.0, g, delta}); };
  const numeric::ScanResult scan = numeric::scan_for_roots(condition, range.lo, range.hi, detail::coupling_scan(grid, tol));

  // Judd points of the same baseline, widened by the disjointness margin.
  CouplingRange judd_range{std::max(range.lo - kJuddDisjointness, 1e-6), range.hi + kJuddDisjointness};
  const ExceptionalSearch<JuddPoint> judd = find_judd_points(n, delta, judd_range, tol, grid);

  ExceptionalSearch<NonJuddeanPoint> out;
  for (const numeric::ScanRoot& root : scan.roots) {
    NonJuddeanPoint pt;
    pt.n = n;
    pt.parity = parity;
    pt.g_star = root.x;
    pt.delta = delta;
    pt.condition_residual = std::abs(condition(root.x));
    const ModelParams p{1.0, root.x, delta};
    const DegeneracyGap gap = degeneracy_gap(p, baseline_energy(n, p), kOracleGapTol);
    pt.oracle_gap_same_parity = gap.of(parity);
    pt.oracle_gap_other_parity = gap.of(other(parity));

    const bool near_judd = std::any_of(judd.points.begin(), judd.points.end(), [&](const JuddPoint& j) {
      return std::abs(j.g_star - root.x) <= kJuddDisjointness;
    });
    if (near_judd) {
      pt.note = "within disjointness margin of a Juddean point";
    } else if (pt.oracle_gap_same_parity > kNonJuddSameGapThreshold) {
      pt.note = "no same-parity oracle level on the baseline";
    } else if (pt.oracle_gap_other_parity < kNonJuddOtherGapFloor) {
      pt.note = "other parity too close to the baseline";
    } else {
      pt.accepted = true;
    }
    (pt.accepted ? out.points : out.rejected).push_back(pt);
  }
  for (const numeric::ScanDip& dip : scan.unresolved) {
    NonJuddeanPoint pt;
    pt.n = n;
    pt.parity = parity;
    pt.g_star = dip.x;
    pt.delta = delta;
    pt.condition_residual = std::abs(dip.value);
    pt.multiplicity = 2;
    pt.note = "tangential zero";
    out.rejected.push_back(pt);
  }
  return out;
}

// Verdict for baseline n at one parameter point. `tol` bounds |x - n| of the
// nearest eigenvalue (first order in the Laurent data) for a tentative
// exceptional verdict; the oracle is consulted only for tentative verdicts.
inline ExceptionalClassification classify_exceptional(int n, const ModelParams& params, double tol = 1e-9) {
  if (n < 0) throw Error("baseline index must be >= 0");
  const ModelParams p = validate(params);
  detail::require_coupling(p);

  ExceptionalClassification out;
  out.n = n;
  out.evidence.judd_constraint = judd_constraint(n, p);
  if (p.delta == 0.0) {
    out.verdict = Verdict::Juddean;
    out.evidence.offset_plus = 0.0;
    out.evidence.offset_minus = 0.0;
    out.evidence.gap_plus = 0.0;
    out.evidence.gap_minus = 0.0;
    return out;
  }

  out.evidence.condition_plus = nonjuddean_condition(n, Parity::Plus, p);
  out.evidence.condition_minus = nonjuddean_condition(n, Parity::Minus, p);
  out.evidence.offset_plus = std::abs(g_eval_regularized(n, Parity::Plus, p).root_offset());
  out.evidence.offset_minus = std::abs(g_eval_regularized(n, Parity::Minus, p).root_offset());
  const bool on_plus = out.evidence.offset_plus <= tol;
  const bool on_minus = out.evidence.offset_minus <= tol;
  if (!on_plus && !on_minus) return out;

  const DegeneracyGap gap = degeneracy_gap(p, baseline_energy(n, p), kOracleGapTol * p.omega);
  out.evidence.oracle_checked = true;
  out.evidence.gap_plus = gap.plus;
  out.evidence.gap_minus = gap.minus;
  if (on_plus && on_minus) {
    if (std::max(gap.plus, gap.minus) <= kJuddGapThreshold * p.omega) out.verdict = Verdict::Juddean;
    return out;
  }
  const Parity parity = on_plus ? Parity::Plus : Parity::Minus;
  if (gap.of(parity) <= kNonJuddSameGapThreshold * p.omega &&
      gap.of(other(parity)) >= kNonJuddOtherGapFloor * p.omega) {
    out.verdict = nonjuddean_verdict(parity);
  }
  return out;
}

}  // namespace rabi

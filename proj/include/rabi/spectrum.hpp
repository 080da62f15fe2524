#pragma once

// Low-lying spectrum from the G-function, interval by interval.
//
// Each parity sector is split into
//   * the pole-free region below x = 0, scanned over [-delta - 0.01, -guard];
//   * open baseline intervals (n + guard, n + 1 - guard), scanned directly;
//   * bands |x - n| < guard around each baseline, where the lifted function
//     (x - n) G(x) is continuous and carries the eigenvalue nearest the pole;
//   * the baselines themselves, which belong to classify_exceptional.
// A census of (n, n + 1) covers the interior scan and both adjacent bands.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rabi/errors.hpp"
#include "rabi/exceptional.hpp"
#include "rabi/gfunction.hpp"
#include "rabi/model.hpp"
#include "rabi/numeric.hpp"
#include "rabi/oracle.hpp"

namespace rabi {

inline constexpr int kMaxSpectrumBaselines = 30;
// Margin below the ground-state bound x > -delta scanned for safety.
inline constexpr double kLowestRegionMargin = 0.01;

struct ScanConfig {
  int points = 200;
  double guard = 1e-4;
  double bisect_tol = 1e-12;
  double tangency_factor = 1e-3;
  int refine_factor = 10;
  double eps = kDefaultSeriesEps;
  double exceptional_tol = 1e-9;

  bool operator==(const ScanConfig&) const = default;
};

struct IntervalCensus {
  int n = 0;  // -1 for the region below the first pole
  Parity parity = Parity::Plus;
  int count = 0;
  std::vector<double> zeros;
  std::vector<double> zero_half_widths;
  ExceptionalClassification endpoint_left;
  ExceptionalClassification endpoint_right;
  bool suspicious = false;
  std::vector<double> suspicious_at;
};

inline numeric::ScanSettings to_scan_settings(const ScanConfig& scan) {
  numeric::ScanSettings s;
  s.points = scan.points;
  s.tol = scan.bisect_tol;
  s.tangency_factor = scan.tangency_factor;
  s.refine_factor = scan.refine_factor;
  return s;
}

namespace detail {

inline EigenvalueRecord gfunction_record(double x, Parity parity, Classification c, double half_width,
                                         const ModelParams& p) {
  EigenvalueRecord r;
  r.x = ScaledEnergy{x};
  r.energy = energy_from_x(r.x, p);
  r.parity = parity;
  r.classification = c;
  r.interval_index = is_exceptional(c) ? static_cast<int>(std::lround(x)) : interval_of(x);
  r.source = Source::GFunction;
  r.uncertainty = half_width * p.omega;
  return r;
}

// Eigenvalue of `parity` inside the band |x - n| < guard, if any. The lifted
// function (x - n) G(x) is regular at n; within the pole guard it is replaced
// by its first-order Laurent form.
inline std::optional<numeric::ScanRoot> band_root(int n, Parity parity, const ModelParams& p,
                                                  const ScanConfig& scan, const RegularizedG& reg) {
  const double offset = reg.root_offset();
  if (!(std::abs(offset) < scan.guard)) return std::nullopt;
  auto lifted = [&](double x) {
    const double h = x - n;
    if (std::abs(h) <= 2.0 * kPoleGuard) return reg.residue + reg.finite_part * h;
    return h * g_eval(parity, ScaledEnergy{x}, p, scan.eps).value;
  };
  const double lo = n - scan.guard;
  const double hi = n + scan.guard;
  const double f_lo = lifted(lo);
  const double f_hi = lifted(hi);
  if (numeric::sign(f_lo) == numeric::sign(f_hi)) return numeric::ScanRoot{n + offset, std::abs(offset)};
  const numeric::Bracket br = numeric::bisect(lifted, lo, hi, f_lo, scan.bisect_tol);
  if (!(std::abs(br.mid() - n) < scan.guard)) return std::nullopt;
  return numeric::ScanRoot{br.mid(), br.half_width()};
}

}  // namespace detail

// Zeros of G_parity in the open interval (n, n + 1); n = -1 selects the
// region below the first pole. The interior (n + guard, n + 1 - guard) is
// scanned; each guard band contributes the band root on its interior side.
// A band root within exceptional_tol of the baseline sits on it and is left
// to classify_exceptional. Endpoint verdicts are filled when
// `classify_endpoints` is set (it costs two classify_exceptional calls).
inline IntervalCensus count_zeros_in_interval(Parity parity, int n, const ModelParams& params,
                                              const ScanConfig& scan = {}, bool classify_endpoints = true) {
  if (!(scan.guard > 0.0) || scan.points < 3) throw InvalidParameter("scan", scan.guard);
  if (n < -1) throw InvalidParameter("n", n);
  const ModelParams p = validate(params);
  detail::require_coupling(p);

  const double lo = n >= 0 ? n + scan.guard : -p.delta_scaled() - kLowestRegionMargin;
  const double hi = n >= 0 ? n + 1 - scan.guard : -scan.guard;
  auto f = [&](double x) { return g_eval(parity, ScaledEnergy{x}, p, scan.eps).value; };
  const numeric::ScanResult res = numeric::scan_for_roots(f, lo, hi, to_scan_settings(scan));

  std::vector<numeric::ScanRoot> roots = res.roots;
  if (p.delta != 0.0) {
    for (const int b : {n, n + 1}) {
      if (b < 0) continue;
      const RegularizedG reg = g_eval_regularized(b, parity, p, scan.eps);
      if (std::abs(reg.root_offset()) <= scan.exceptional_tol) continue;
      const auto root = detail::band_root(b, parity, p, scan, reg);
      if (root && (b == n ? root->x > b : root->x < b)) roots.push_back(*root);
    }
    std::sort(roots.begin(), roots.end(),
              [](const numeric::ScanRoot& x, const numeric::ScanRoot& y) { return x.x < y.x; });
  }

  IntervalCensus out;
  out.n = n;
  out.parity = parity;
  for (const numeric::ScanRoot& r : roots) {
    out.zeros.push_back(r.x);
    out.zero_half_widths.push_back(r.half_width);
  }
  out.count = static_cast<int>(out.zeros.size());
  for (const numeric::ScanDip& d : res.unresolved) out.suspicious_at.push_back(d.x);
  out.suspicious = !out.suspicious_at.empty();
  if (classify_endpoints) {
    if (n >= 0) out.endpoint_left = classify_exceptional(n, p, scan.exceptional_tol);
    out.endpoint_right = classify_exceptional(n + 1, p, scan.exceptional_tol);
  }
  return out;
}

// Records for both parities with x below n_max: regular roots, band roots and
// exceptional eigenvalues. g == 0 is answered by the oracle's closed form.
inline std::vector<EigenvalueRecord> solve_spectrum(const ModelParams& params, int n_max, const ScanConfig& scan = {}) {
  if (n_max < 1 || n_max > kMaxSpectrumBaselines) throw InvalidParameter("n_max", n_max);
  const ModelParams p = validate(params);
  if (p.g == 0.0) {
    OracleSpectrum closed = oracle_spectrum(p, n_max * p.omega, 1e-12);
    std::vector<EigenvalueRecord> out;
    for (const EigenvalueRecord& r : closed.records) {
      if (r.x.x < n_max) out.push_back(r);
    }
    return out;
  }

  std::vector<ExceptionalClassification> verdicts;
  for (int b = 0; b <= n_max; ++b) verdicts.push_back(classify_exceptional(b, p, scan.exceptional_tol));

  std::vector<EigenvalueRecord> out;
  for (Parity parity : {Parity::Plus, Parity::Minus}) {
    for (int n = -1; n < n_max; ++n) {
      const IntervalCensus census = count_zeros_in_interval(parity, n, p, scan, false);
      for (std::size_t i = 0; i < census.zeros.size(); ++i) {
        out.push_back(detail::gfunction_record(census.zeros[i], parity, Classification::Regular,
                                               census.zero_half_widths[i], p));
        out.back().suspicious = census.suspicious;
      }
    }
    for (int b = 0; b < n_max; ++b) {
      const Verdict v = verdicts[static_cast<std::size_t>(b)].verdict;
      if (v != Verdict::Juddean && v != nonjuddean_verdict(parity)) {
        // A root on the baseline that the oracle would not confirm is still
        // an eigenvalue; the census leaves it out, so it is recorded here.
        if (p.delta == 0.0) continue;
        const RegularizedG reg = g_eval_regularized(b, parity, p, scan.eps);
        const double offset = reg.root_offset();
        if (std::abs(offset) <= scan.exceptional_tol) {
          out.push_back(detail::gfunction_record(b + offset, parity, Classification::Regular,
                                                 scan.exceptional_tol, p));
        }
        continue;
      }
      const Classification c =
          v == Verdict::Juddean ? Classification::ExceptionalJuddean : Classification::ExceptionalNonJuddean;
      out.push_back(detail::gfunction_record(b, parity, c, scan.exceptional_tol, p));
    }
  }
  std::sort(out.begin(), out.end(), record_less);
  return out;
}

struct RecordMatch {
  EigenvalueRecord gfunction;
  EigenvalueRecord oracle;
  double deviation = 0.0;
};

struct DiffReport {
  std::vector<RecordMatch> matches;
  std::vector<EigenvalueRecord> unmatched_gfunction;
  std::vector<EigenvalueRecord> unmatched_oracle;
  double max_deviation = 0.0;
  int mismatches = 0;  // matched pairs deviating by more than tol
  double tol = 0.0;
  bool pass = false;
};

// Records farther apart than this are never paired.
inline constexpr double kMatchRadius = 1e-3;  // times omega

// One-to-one pairing by nearest energy within each parity: closest pairs are
// fixed first.
inline DiffReport diff_records(const std::vector<EigenvalueRecord>& gfunction,
                               const std::vector<EigenvalueRecord>& oracle, double tol, double omega = 1.0) {
  DiffReport rep;
  rep.tol = tol;
  struct Candidate {
    double d;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < gfunction.size(); ++i) {
    for (std::size_t j = 0; j < oracle.size(); ++j) {
      if (gfunction[i].parity != oracle[j].parity) continue;
      const double d = std::abs(gfunction[i].energy - oracle[j].energy);
      if (d <= kMatchRadius * omega) cands.push_back({d, i, j});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<bool> used_g(gfunction.size(), false);
  std::vector<bool> used_o(oracle.size(), false);
  for (const Candidate& c : cands) {
    if (used_g[c.i] || used_o[c.j]) continue;
    used_g[c.i] = used_o[c.j] = true;
    rep.matches.push_back({gfunction[c.i], oracle[c.j], c.d});
    rep.max_deviation = std::max(rep.max_deviation, c.d);
    if (c.d > tol) ++rep.mismatches;
  }
  std::sort(rep.matches.begin(), rep.matches.end(),
            [](const RecordMatch& a, const RecordMatch& b) { return record_less(a.gfunction, b.gfunction); });
  for (std::size_t i = 0; i < gfunction.size(); ++i) {
    if (!used_g[i]) rep.unmatched_gfunction.push_back(gfunction[i]);
  }
  for (std::size_t j = 0; j < oracle.size(); ++j) {
    if (!used_o[j]) rep.unmatched_oracle.push_back(oracle[j]);
  }
  rep.pass = rep.unmatched_gfunction.empty() && rep.unmatched_oracle.empty() && rep.mismatches == 0;
  return rep;
}

// Levels this close below the ceiling x = n_max are left out on both sides.
inline constexpr double kCeilingMargin = 1e-9;

inline DiffReport crosscheck(const ModelParams& params, int n_max, double tol, const ScanConfig& scan = {}) {
  const ModelParams p = validate(params);
  auto below = [&](const EigenvalueRecord& r) { return r.x.x < n_max - kCeilingMargin; };

  std::vector<EigenvalueRecord> gf;
  for (const EigenvalueRecord& r : solve_spectrum(p, n_max, scan)) {
    if (below(r)) gf.push_back(r);
  }
  const OracleSpectrum spec = oracle_spectrum(p, baseline_energy(n_max, p), std::min(1e-11, 0.01 * tol) * p.omega);
  std::vector<EigenvalueRecord> orc;
  for (const EigenvalueRecord& r : spec.records) {
    if (below(r)) orc.push_back(r);
  }
  return diff_records(gf, orc, tol * p.omega, p.omega);
}

struct SplittingRow {
  double g = 0.0;
  std::vector<double> splittings;  // s_n for n = 0 .. n_max - 1, omega units
  bool ok = true;
  std::string error;
};

struct SplittingTable {
  double delta = 0.0;
  int n_max = 0;
  std::vector<SplittingRow> rows;
  // Least-squares fit ln s_0 = intercept - decay_rate * g^2 over rows with
  // s_0 > 0; NaN with fewer than two usable rows.
  double decay_rate = std::numeric_limits<double>::quiet_NaN();
  double decay_intercept = std::numeric_limits<double>::quiet_NaN();
};

// Parity splittings s_n(g) = |E_n^+ - E_n^-| of the n-th level of each sector
// (omega = 1), from the oracle.
inline SplittingTable asymptotic_check(double delta, const std::vector<double>& g_values, int n_max) {
  if (n_max < 1) throw InvalidParameter("n_max", n_max);
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidParameter("delta", delta);
  for (std::size_t i = 0; i < g_values.size(); ++i) {
    if (!(g_values[i] >= 1.5)) throw InvalidParameter("g", g_values[i]);
    if (i > 0 && !(g_values[i] > g_values[i - 1])) throw InvalidParameter("g", g_values[i]);
  }

  SplittingTable table;
  table.delta = delta;
  table.n_max = n_max;
  for (double g : g_values) {
    SplittingRow row;
    row.g = g;
    try {
      const ModelParams p{1.0, g, delta};
      const OracleSpectrum spec = oracle_spectrum(p, baseline_energy(n_max, p) + delta + 1.0, 1e-13);
      std::vector<double> plus, minus;
      for (const EigenvalueRecord& r : spec.records) (r.parity == Parity::Plus ? plus : minus).push_back(r.energy);
      if (static_cast<int>(plus.size()) < n_max || static_cast<int>(minus.size()) < n_max) {
        throw Error("oracle window holds fewer than n_max levels per parity");
      }
      for (int n = 0; n < n_max; ++n) row.splittings.push_back(std::abs(plus[n] - minus[n]));
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
      row.splittings.clear();
    }
    table.rows.push_back(row);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const SplittingRow& row : table.rows) {
    if (!row.ok || !(row.splittings[0] > 0.0)) continue;
    const double u = row.g * row.g;
    const double v = std::log(row.splittings[0]);
    sx += u;
    sy += v;
    sxx += u * u;
    sxy += u * v;
    ++count;
  }
  if (count >= 2) {
    const double denom = count * sxx - sx * sx;
    const double slope = (count * sxy - sx * sy) / denom;
    table.decay_rate = -slope;
    table.decay_intercept = (sy - slope * sx) / count;
  }
  return table;
}

}  // namespace rabi

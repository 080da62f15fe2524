#pragma once

// Counting predicates on per-interval zero censuses and the parameter sweep
// that evaluates them over a (g, delta) grid.
//
// Classic clauses, per parity over a contiguous range of intervals:
//   (a) every count is 0, 1 or 2;
//   (b) every interval with count 2 shares an endpoint with an interval of
//       count 0. At the ends of the covered range only the in-range
//       neighbour is consulted.
//
// The extended form applies the same clauses to effective counts, in which
// each exceptional eigenvalue on a baseline is attributed to one of the two
// adjacent intervals according to an AttributionRule.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rabi/errors.hpp"
#include "rabi/exceptional.hpp"
#include "rabi/model.hpp"
#include "rabi/spectrum.hpp"

namespace rabi {

enum class PredicateVersion { Classic, Extended };

inline const char* to_string(PredicateVersion v) { return v == PredicateVersion::Classic ? "classic" : "extended"; }

inline PredicateVersion parse_predicate_version(const std::string& s) {
  if (s == "classic") return PredicateVersion::Classic;
  if (s == "extended") return PredicateVersion::Extended;
  throw Error("unknown predicate version '" + s + "'");
}

enum class Side { Left, Right };

inline const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }

inline Side parse_side(const std::string& s) {
  if (s == "left") return Side::Left;
  if (s == "right") return Side::Right;
  throw Error("unknown side '" + s + "'");
}

// Where exceptional eigenvalues on baseline n are counted: the left interval
// is (n - 1, n), the right one (n, n + 1).
struct AttributionRule {
  // Split sends the Plus member of a Juddean pair left and the Minus member
  // right; Left/Right send both members to that side.
  enum class Juddean { Split, Left, Right };
  Juddean juddean = Juddean::Split;
  Side nonjuddean = Side::Right;

  bool operator==(const AttributionRule&) const = default;
};

inline const char* to_string(AttributionRule::Juddean j) {
  switch (j) {
    case AttributionRule::Juddean::Split: return "split";
    case AttributionRule::Juddean::Left: return "left";
    case AttributionRule::Juddean::Right: return "right";
  }
  return "?";
}

inline AttributionRule::Juddean parse_juddean_rule(const std::string& s) {
  if (s == "split") return AttributionRule::Juddean::Split;
  if (s == "left") return AttributionRule::Juddean::Left;
  if (s == "right") return AttributionRule::Juddean::Right;
  throw Error("unknown Juddean attribution '" + s + "'");
}

struct Violation {
  int n = 0;
  Parity parity = Parity::Plus;
  int count = 0;
  std::string reason;

  bool operator==(const Violation&) const = default;
};

struct ConjecturePredicateResult {
  bool holds = true;
  std::vector<Violation> violations;
  PredicateVersion predicate_version = PredicateVersion::Classic;

  bool operator==(const ConjecturePredicateResult&) const = default;
};

inline constexpr const char* kReasonCountRange = "count outside {0, 1, 2}";
inline constexpr const char* kReasonNoEmptyNeighbour = "two-zero interval without an empty neighbour";

// Interval counts keyed by parity (Plus first), then interval index.
using CountTable = std::map<Parity, std::map<int, int>>;

namespace detail {

inline CountTable tabulate(std::span<const IntervalCensus> censuses) {
  CountTable table;
  for (const IntervalCensus& c : censuses) {
    auto& row = table[c.parity];
    if (!row.emplace(c.n, c.count).second) {
      throw IncompleteCoverage("duplicate census for interval " + std::to_string(c.n));
    }
  }
  for (const auto& [parity, row] : table) {
    if (row.empty()) continue;
    if (row.rbegin()->first - row.begin()->first + 1 != static_cast<int>(row.size())) {
      throw IncompleteCoverage(std::string("interval range has gaps for parity ") + std::string(to_string(parity)));
    }
  }
  return table;
}

inline ConjecturePredicateResult apply_clauses(const CountTable& table, PredicateVersion version) {
  ConjecturePredicateResult out;
  out.predicate_version = version;
  for (const auto& [parity, row] : table) {
    for (const auto& [n, count] : row) {
      if (count < 0 || count > 2) out.violations.push_back({n, parity, count, kReasonCountRange});
      if (count != 2) continue;
      bool empty_neighbour = false;
      for (int nb : {n - 1, n + 1}) {
        const auto it = row.find(nb);
        if (it != row.end() && it->second == 0) empty_neighbour = true;
      }
      if (!empty_neighbour) out.violations.push_back({n, parity, count, kReasonNoEmptyNeighbour});
    }
  }
  out.holds = out.violations.empty();
  return out;
}

}  // namespace detail

inline ConjecturePredicateResult predicate_classic(std::span<const IntervalCensus> censuses) {
  return detail::apply_clauses(detail::tabulate(censuses), PredicateVersion::Classic);
}

// Effective counts add every exceptional eigenvalue on a baseline to one
// adjacent interval; contributions landing outside the covered range are
// dropped. An empty verdict list means nothing is exceptional; otherwise
// every interior baseline of the covered range needs a verdict.
inline ConjecturePredicateResult predicate_extended(std::span<const IntervalCensus> censuses,
                                                    std::span<const ExceptionalClassification> verdicts,
                                                    const AttributionRule& rule = {}) {
  CountTable table = detail::tabulate(censuses);
  std::map<int, Verdict> by_baseline;
  for (const ExceptionalClassification& v : verdicts) by_baseline[v.n] = v.verdict;

  for (const auto& [parity, row] : table) {
    if (row.empty() || verdicts.empty()) continue;
    for (int b = row.begin()->first + 1; b <= row.rbegin()->first; ++b) {
      if (!by_baseline.contains(b)) {
        throw IncompleteCoverage("missing exceptional verdict for interior baseline " + std::to_string(b));
      }
    }
  }

  auto credit = [&](Parity parity, int baseline, Side side) {
    auto& row = table[parity];
    const int interval = side == Side::Left ? baseline - 1 : baseline;
    const auto it = row.find(interval);
    if (it != row.end()) ++it->second;
  };
  for (const auto& [b, verdict] : by_baseline) {
    switch (verdict) {
      case Verdict::NotExceptional:
        break;
      case Verdict::Juddean:
        switch (rule.juddean) {
          case AttributionRule::Juddean::Split:
            credit(Parity::Plus, b, Side::Left);
            credit(Parity::Minus, b, Side::Right);
            break;
          case AttributionRule::Juddean::Left:
            credit(Parity::Plus, b, Side::Left);
            credit(Parity::Minus, b, Side::Left);
            break;
          case AttributionRule::Juddean::Right:
            credit(Parity::Plus, b, Side::Right);
            credit(Parity::Minus, b, Side::Right);
            break;
        }
        break;
      case Verdict::NonJuddeanPlus:
        credit(Parity::Plus, b, rule.nonjuddean);
        break;
      case Verdict::NonJuddeanMinus:
        credit(Parity::Minus, b, rule.nonjuddean);
        break;
    }
  }
  return detail::apply_clauses(table, PredicateVersion::Extended);
}

// Sweep configuration. `jobs` only affects execution, never the report.
struct SweepConfig {
  std::vector<double> g_grid;
  std::vector<double> delta_grid;
  int n_max = 8;
  PredicateVersion predicate_version = PredicateVersion::Classic;
  AttributionRule attribution;
  ScanConfig scan;
  int jobs = 1;
  bool record_timing = false;

  bool operator==(const SweepConfig& o) const {
    return g_grid == o.g_grid && delta_grid == o.delta_grid && n_max == o.n_max &&
           predicate_version == o.predicate_version && attribution == o.attribution && scan == o.scan &&
           record_timing == o.record_timing;
  }
};

inline void validate_sweep_config(const SweepConfig& c) {
  auto check_grid = [](const std::vector<double>& grid, const char* name, bool positive) {
    if (grid.empty()) throw InvalidParameter(name, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!std::isfinite(grid[i]) || (positive && !(grid[i] > 0.0)) || grid[i] < 0.0) {
        throw InvalidParameter(name, grid[i]);
      }
      if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidParameter(name, grid[i]);
    }
  };
  check_grid(c.g_grid, "g_grid", true);
  check_grid(c.delta_grid, "delta_grid", false);
  if (c.n_max < 1 || c.n_max > kMaxSpectrumBaselines) throw InvalidParameter("n_max", c.n_max);
  if (c.jobs < 1) throw InvalidParameter("jobs", c.jobs);
}

struct CensusSummary {
  int n = 0;
  Parity parity = Parity::Plus;
  int count = 0;
  std::vector<double> zeros;
  bool suspicious = false;

  bool operator==(const CensusSummary&) const = default;
};

struct VerdictSummary {
  int n = 0;
  Verdict verdict = Verdict::NotExceptional;

  bool operator==(const VerdictSummary&) const = default;
};

enum class PointStatus { Ok, Errored };

struct PointReport {
  double g = 0.0;
  double delta = 0.0;
  std::vector<CensusSummary> censuses;
  std::vector<VerdictSummary> exceptional;
  ConjecturePredicateResult predicate;
  // Present when the configured predicate is classic and some baseline is
  // exceptional; the point holds only if both forms hold.
  std::optional<ConjecturePredicateResult> predicate_extended;
  PointStatus status = PointStatus::Ok;
  std::string error;
  std::optional<double> elapsed_seconds;

  bool holds() const {
    return status == PointStatus::Ok && predicate.holds && (!predicate_extended || predicate_extended->holds);
  }
  bool operator==(const PointReport&) const = default;
};

struct ReportSummary {
  int total_points = 0;
  int violating_points = 0;
  int errored_points = 0;
  int suspicious_intervals = 0;
  std::optional<double> runtime_seconds;

  bool operator==(const ReportSummary&) const = default;
};

inline constexpr const char* kReportVersion = "1";

struct ConjectureReport {
  SweepConfig config;
  std::vector<PointReport> points;  // delta outer, g inner
  ReportSummary summary;
  std::string version = kReportVersion;

  bool operator==(const ConjectureReport&) const = default;
};

// Censuses, baseline verdicts and predicates at a single grid point.
inline PointReport evaluate_point(double g, double delta, const SweepConfig& config) {
  PointReport pt;
  pt.g = g;
  pt.delta = delta;
  const auto start = std::chrono::steady_clock::now();
  try {
    const ModelParams p = make_params(1.0, g, delta);
    std::vector<IntervalCensus> censuses;
    for (Parity parity : {Parity::Plus, Parity::Minus}) {
      for (int n = 0; n < config.n_max; ++n) {
        censuses.push_back(count_zeros_in_interval(parity, n, p, config.scan, false));
      }
    }
    std::vector<ExceptionalClassification> verdicts;
    for (int b = 0; b <= config.n_max; ++b) verdicts.push_back(classify_exceptional(b, p, config.scan.exceptional_tol));
    for (IntervalCensus& c : censuses) {
      c.endpoint_left = verdicts[static_cast<std::size_t>(c.n)];
      c.endpoint_right = verdicts[static_cast<std::size_t>(c.n + 1)];
    }

    for (const IntervalCensus& c : censuses) pt.censuses.push_back({c.n, c.parity, c.count, c.zeros, c.suspicious});
    bool any_exceptional = false;
    for (const ExceptionalClassification& v : verdicts) {
      pt.exceptional.push_back({v.n, v.verdict});
      any_exceptional = any_exceptional || v.verdict != Verdict::NotExceptional;
    }
    if (config.predicate_version == PredicateVersion::Classic) {
      pt.predicate = predicate_classic(censuses);
      if (any_exceptional) pt.predicate_extended = predicate_extended(censuses, verdicts, config.attribution);
    } else {
      pt.predicate = predicate_extended(censuses, verdicts, config.attribution);
    }
  } catch (const std::exception& e) {
    pt.status = PointStatus::Errored;
    pt.error = e.what();
    pt.censuses.clear();
    pt.exceptional.clear();
    pt.predicate = ConjecturePredicateResult{};
    pt.predicate.predicate_version = config.predicate_version;
    pt.predicate_extended.reset();
  }
  if (config.record_timing) {
    pt.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return pt;
}

// Every grid point is evaluated independently; `jobs` worker threads pull
// points from a shared counter and write into fixed slots, so the report is
// identical for any degree of parallelism.
inline ConjectureReport sweep(const SweepConfig& config) {
  validate_sweep_config(config);
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::pair<double, double>> grid;
  for (double delta : config.delta_grid) {
    for (double g : config.g_grid) grid.emplace_back(g, delta);
  }
  std::vector<PointReport> points(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
      points[i] = evaluate_point(grid[i].first, grid[i].second, config);
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), grid.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ConjectureReport report;
  report.config = config;
  report.points = std::move(points);
  report.summary.total_points = static_cast<int>(report.points.size());
  for (const PointReport& pt : report.points) {
    if (pt.status == PointStatus::Errored) {
      ++report.summary.errored_points;
      continue;
    }
    if (!pt.holds()) ++report.summary.violating_points;
    for (const CensusSummary& c : pt.censuses) report.summary.suspicious_intervals += c.suspicious ? 1 : 0;
  }
  if (config.record_timing) {
    report.summary.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return report;
}

}  // namespace rabi

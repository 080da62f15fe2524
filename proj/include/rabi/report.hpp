#pragma once

// JSON form of a ConjectureReport.
//
// Top-level keys: config, points (row-major, delta outer), summary, version.
// Floating-point numbers are written with 17 significant digits so parsing
// restores them bit for bit; non-finite values become null.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rabi/conjecture.hpp"
#include "rabi/errors.hpp"
#include "rabi/numeric.hpp"

namespace rabi {

namespace json_io {

using Json = nlohmann::ordered_json;

// Pretty printer with fixed number formatting; nlohmann's own dump() picks
// the shortest round-trip form instead.
inline void write(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(it.key()).dump() << ": ";
        write(os, it.value(), indent, depth + 1);
      }
      os << "\n" << close_pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool scalars = true;
      for (const Json& e : j) scalars = scalars && !e.is_structured();
      if (scalars) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write(os, j[i], indent, depth + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write(os, j[i], indent, depth + 1);
      }
      os << "\n" << close_pad << "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      os << (std::isfinite(v) ? numeric::format_double(v) : "null");
      return;
    }
    default:
      os << j.dump();
  }
}

inline std::string to_string(const Json& j) {
  std::ostringstream os;
  write(os, j, 2, 0);
  os << "\n";
  return os.str();
}

// Field access with the JSON path in the error.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const Json& at(std::string_view key) const {
    if (!j_.is_object()) fail(path_, "expected an object");
    const auto it = j_.find(std::string(key));
    if (it == j_.end()) fail(path_ + "." + std::string(key), "missing field");
    return *it;
  }
  bool has(std::string_view key) const { return j_.is_object() && j_.contains(std::string(key)); }

  Reader child(std::string_view key) const { return Reader(at(key), path_ + "." + std::string(key)); }

  double number(std::string_view key) const { return as_number(at(key), path_ + "." + std::string(key)); }
  int integer(std::string_view key) const {
    const Json& v = at(key);
    if (!v.is_number_integer()) fail(path_ + "." + std::string(key), "expected an integer");
    return v.get<int>();
  }
  bool boolean(std::string_view key) const {
    const Json& v = at(key);
    if (!v.is_boolean()) fail(path_ + "." + std::string(key), "expected a boolean");
    return v.get<bool>();
  }
  std::string text(std::string_view key) const {
    const Json& v = at(key);
    if (!v.is_string()) fail(path_ + "." + std::string(key), "expected a string");
    return v.get<std::string>();
  }
  std::vector<Reader> array(std::string_view key) const {
    const Json& v = at(key);
    const std::string p = path_ + "." + std::string(key);
    if (!v.is_array()) fail(p, "expected an array");
    std::vector<Reader> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], p + "[" + std::to_string(i) + "]");
    return out;
  }
  std::vector<double> numbers(std::string_view key) const {
    std::vector<double> out;
    for (const Reader& r : array(key)) out.push_back(as_number(r.j_, r.path_));
    return out;
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what, 0);
  }

 private:
  static double as_number(const Json& v, const std::string& path) {
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  const Json& j_;
  std::string path_;
};

template <class F>
auto guarded(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    Reader::fail(path, e.what());
  }
}

inline Json predicate_to_json(const ConjecturePredicateResult& r) {
  Json j;
  j["version"] = to_string(r.predicate_version);
  j["holds"] = r.holds;
  Json vs = Json::array();
  for (const Violation& v : r.violations) {
    vs.push_back({{"n", v.n}, {"parity", to_string(v.parity)}, {"count", v.count}, {"reason", v.reason}});
  }
  j["violations"] = vs;
  return j;
}

inline ConjecturePredicateResult predicate_from_json(const Reader& r) {
  ConjecturePredicateResult out;
  out.predicate_version = guarded("predicate.version", [&] { return parse_predicate_version(r.text("version")); });
  out.holds = r.boolean("holds");
  for (const Reader& v : r.array("violations")) {
    out.violations.push_back({v.integer("n"), guarded("parity", [&] { return parse_parity(v.text("parity")); }),
                              v.integer("count"), v.text("reason")});
  }
  return out;
}

}  // namespace json_io

inline nlohmann::ordered_json report_to_json(const ConjectureReport& report) {
  using json_io::Json;
  const SweepConfig& c = report.config;
  Json config;
  config["g_grid"] = c.g_grid;
  config["delta_grid"] = c.delta_grid;
  config["n_max"] = c.n_max;
  config["predicate_version"] = to_string(c.predicate_version);
  config["attribution"] = {{"juddean", to_string(c.attribution.juddean)},
                           {"nonjuddean", to_string(c.attribution.nonjuddean)}};
  config["scan"] = {{"points", c.scan.points},
                    {"guard", c.scan.guard},
                    {"bisect_tol", c.scan.bisect_tol},
                    {"tangency_factor", c.scan.tangency_factor},
                    {"refine_factor", c.scan.refine_factor},
                    {"eps", c.scan.eps},
                    {"exceptional_tol", c.scan.exceptional_tol}};
  config["record_timing"] = c.record_timing;

  Json points = Json::array();
  for (const PointReport& pt : report.points) {
    Json j;
    j["g"] = pt.g;
    j["delta"] = pt.delta;
    Json censuses = Json::array();
    for (const CensusSummary& cs : pt.censuses) {
      censuses.push_back({{"n", cs.n},
                          {"parity", to_string(cs.parity)},
                          {"count", cs.count},
                          {"zeros", cs.zeros},
                          {"suspicious", cs.suspicious}});
    }
    j["censuses"] = censuses;
    Json exceptional = Json::array();
    for (const VerdictSummary& v : pt.exceptional) exceptional.push_back({{"n", v.n}, {"verdict", to_string(v.verdict)}});
    j["exceptional"] = exceptional;
    j["predicate"] = json_io::predicate_to_json(pt.predicate);
    if (pt.predicate_extended) j["predicate_extended"] = json_io::predicate_to_json(*pt.predicate_extended);
    j["status"] = pt.status == PointStatus::Ok ? "OK" : "ERRORED";
    if (pt.status == PointStatus::Errored) j["error"] = pt.error;
    if (pt.elapsed_seconds) j["elapsed_seconds"] = *pt.elapsed_seconds;
    points.push_back(j);
  }

  Json summary;
  summary["total_points"] = report.summary.total_points;
  summary["violating_points"] = report.summary.violating_points;
  summary["errored_points"] = report.summary.errored_points;
  summary["suspicious_intervals"] = report.summary.suspicious_intervals;
  if (report.summary.runtime_seconds) summary["runtime_seconds"] = *report.summary.runtime_seconds;

  Json root;
  root["config"] = config;
  root["points"] = points;
  root["summary"] = summary;
  root["version"] = report.version;
  return root;
}

inline std::string report_serialize(const ConjectureReport& report) {
  return json_io::to_string(report_to_json(report));
}

inline ConjectureReport report_parse(std::string_view text) {
  using json_io::Json;
  using json_io::Reader;
  using json_io::guarded;
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
  const Reader top(root, "$");

  ConjectureReport report;
  report.version = top.text("version");
  if (report.version != kReportVersion) Reader::fail("$.version", "unsupported report version " + report.version);

  const Reader cfg = top.child("config");
  report.config.g_grid = cfg.numbers("g_grid");
  report.config.delta_grid = cfg.numbers("delta_grid");
  report.config.n_max = cfg.integer("n_max");
  report.config.predicate_version =
      guarded("$.config.predicate_version", [&] { return parse_predicate_version(cfg.text("predicate_version")); });
  const Reader attr = cfg.child("attribution");
  report.config.attribution.juddean =
      guarded("$.config.attribution.juddean", [&] { return parse_juddean_rule(attr.text("juddean")); });
  report.config.attribution.nonjuddean =
      guarded("$.config.attribution.nonjuddean", [&] { return parse_side(attr.text("nonjuddean")); });
  const Reader scan = cfg.child("scan");
  report.config.scan.points = scan.integer("points");
  report.config.scan.guard = scan.number("guard");
  report.config.scan.bisect_tol = scan.number("bisect_tol");
  report.config.scan.tangency_factor = scan.number("tangency_factor");
  report.config.scan.refine_factor = scan.integer("refine_factor");
  report.config.scan.eps = scan.number("eps");
  report.config.scan.exceptional_tol = scan.number("exceptional_tol");
  report.config.record_timing = cfg.boolean("record_timing");

  for (const Reader& p : top.array("points")) {
    PointReport pt;
    pt.g = p.number("g");
    pt.delta = p.number("delta");
    for (const Reader& c : p.array("censuses")) {
      CensusSummary cs;
      cs.n = c.integer("n");
      cs.parity = guarded("parity", [&] { return parse_parity(c.text("parity")); });
      cs.count = c.integer("count");
      cs.zeros = c.numbers("zeros");
      cs.suspicious = c.boolean("suspicious");
      pt.censuses.push_back(std::move(cs));
    }
    for (const Reader& v : p.array("exceptional")) {
      pt.exceptional.push_back({v.integer("n"), guarded("verdict", [&] { return parse_verdict(v.text("verdict")); })});
    }
    pt.predicate = json_io::predicate_from_json(p.child("predicate"));
    if (p.has("predicate_extended")) pt.predicate_extended = json_io::predicate_from_json(p.child("predicate_extended"));
    const std::string status = p.text("status");
    if (status == "OK") {
      pt.status = PointStatus::Ok;
    } else if (status == "ERRORED") {
      pt.status = PointStatus::Errored;
      pt.error = p.text("error");
    } else {
      Reader::fail("status", "unknown status " + status);
    }
    if (p.has("elapsed_seconds")) pt.elapsed_seconds = p.number("elapsed_seconds");
    report.points.push_back(std::move(pt));
  }

  const Reader sum = top.child("summary");
  report.summary.total_points = sum.integer("total_points");
  report.summary.violating_points = sum.integer("violating_points");
  report.summary.errored_points = sum.integer("errored_points");
  report.summary.suspicious_intervals = sum.integer("suspicious_intervals");
  if (sum.has("runtime_seconds")) report.summary.runtime_seconds = sum.number("runtime_seconds");
  return report;
}

}  // namespace rabi

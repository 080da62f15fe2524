#pragma once

// Command-line front end. `run` parses, validates every flag, dispatches to
// one subcommand and writes one artifact (CSV or JSON) to --out or stdout.
// Exit codes: 0 success, 1 usage/runtime/parse error, 2 conjecture
// violations found (verify only).
//
// A --config file holds flat `key = value` lines naming long options of the
// chosen subcommand without the leading dashes; flags given on the command
// line win. Blank lines and lines starting with '#' are skipped.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rabi/conjecture.hpp"
#include "rabi/errors.hpp"
#include "rabi/exceptional.hpp"
#include "rabi/gfunction.hpp"
#include "rabi/model.hpp"
#include "rabi/numeric.hpp"
#include "rabi/oracle.hpp"
#include "rabi/report.hpp"
#include "rabi/spectrum.hpp"

namespace rabi::cli {

using numeric::format_double;

// Comma-separated rows, LF line endings, 17 significant digits.
class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (std::string_view h : header) {
      if (!first) os_ << ',';
      first = false;
      os_ << h;
    }
    os_ << '\n';
  }

  Csv& cell(double v) { return raw(format_double(v)); }
  Csv& cell(int v) { return raw(std::to_string(v)); }
  Csv& cell(bool v) { return raw(v ? "true" : "false"); }
  Csv& cell(std::string_view v) { return raw(v); }
  Csv& cell(const char* v) { return raw(v); }
  void end_row() {
    os_ << '\n';
    fresh_ = true;
  }
  std::string str() const { return os_.str(); }

 private:
  Csv& raw(std::string_view v) {
    if (!fresh_) os_ << ',';
    fresh_ = false;
    os_ << v;
    return *this;
  }

  std::ostringstream os_;
  bool fresh_ = true;
};

struct Options {
  std::string config_path;
  std::string out_path;
  double omega = 1.0;
  double g = 0.0;
  double delta = 0.0;
  std::string parity = "plus";
  std::string format = "csv";
  int n_max = 8;
  int n = 1;
  double eps = kDefaultSeriesEps;
  double tol = 1e-8;

  // gfunc
  double x_min = 0.05;
  double x_max = 0.95;
  int points = 101;

  // oracle
  double e_max = 5.0;

  // judd / nonjuddean
  double g_min = 0.05;
  double g_max = 3.0;
  int grid = kDefaultCouplingGrid;
  double root_tol = 1e-10;

  // verify
  double grid_g_min = 0.1;
  double grid_g_max = 2.0;
  int g_steps = 20;
  double delta_min = 0.075;
  double delta_max = 1.5;
  int delta_steps = 20;
  int jobs = 1;
  std::string predicate = "classic";
  std::string attribution_juddean = "split";
  std::string attribution_nonjuddean = "right";
  int scan_points = 200;
  bool timestamp = false;

  // asymptotic
  std::vector<double> g_values{1.5, 2.0, 2.5, 3.0};
};

struct Outcome {
  std::string artifact;
  int exit_code = 0;
};

namespace detail {

inline ModelParams params_of(const Options& o) { return make_params(o.omega, o.g, o.delta); }

inline void record_cells(Csv& csv, const EigenvalueRecord& r) {
  csv.cell(r.energy)
      .cell(r.x.x)
      .cell(to_string(r.parity))
      .cell(to_string(r.classification))
      .cell(r.interval_index)
      .cell(r.uncertainty)
      .cell(to_string(r.source))
      .cell(r.suspicious);
  csv.end_row();
}

inline std::string records_artifact(const std::vector<EigenvalueRecord>& records, const std::string& format) {
  if (format == "json") {
    json_io::Json arr = json_io::Json::array();
    for (const EigenvalueRecord& r : records) {
      arr.push_back({{"energy", r.energy},
                     {"x", r.x.x},
                     {"parity", to_string(r.parity)},
                     {"classification", to_string(r.classification)},
                     {"interval", r.interval_index},
                     {"uncertainty", r.uncertainty},
                     {"source", to_string(r.source)},
                     {"suspicious", r.suspicious}});
    }
    return json_io::to_string(arr);
  }
  Csv csv{"energy", "x", "parity", "classification", "interval", "uncertainty", "source", "suspicious"};
  for (const EigenvalueRecord& r : records) record_cells(csv, r);
  return csv.str();
}

inline Outcome gfunc(const Options& o) {
  if (o.points < 1) throw InvalidParameter("points", o.points);
  if (!(o.x_max >= o.x_min)) throw InvalidParameter("x-max", o.x_max);
  const ModelParams p = validate(params_of(o));
  const Parity parity = parse_parity(o.parity);
  Csv csv{"x", "G", "error_estimate"};
  for (double x : numeric::linspace(o.x_min, o.x_max, o.points)) {
    double value = std::numeric_limits<double>::quiet_NaN();
    double err = std::numeric_limits<double>::quiet_NaN();
    try {
      const GValue v = g_eval(parity, ScaledEnergy{x}, p, o.eps);
      value = v.value;
      err = v.error_estimate;
    } catch (const PoleProximity&) {
      // Left as nan so plotting tools break the curve at the pole.
    }
    csv.cell(x).cell(value).cell(err);
    csv.end_row();
  }
  return {csv.str(), 0};
}

inline ScanConfig scan_of(const Options& o) {
  ScanConfig scan;
  scan.points = o.scan_points;
  scan.eps = o.eps;
  return scan;
}

inline Outcome spectrum(const Options& o) {
  return {records_artifact(solve_spectrum(params_of(o), o.n_max, scan_of(o)), o.format), 0};
}

inline Outcome oracle(const Options& o) {
  return {records_artifact(oracle_spectrum(params_of(o), o.e_max, o.tol * o.omega).records, o.format), 0};
}

inline Outcome judd(const Options& o) {
  const CouplingRange range{o.g_min / o.omega, o.g_max / o.omega};
  const auto found = find_judd_points(o.n, std::abs(o.delta) / o.omega, range, o.root_tol / o.omega, o.grid);
  Csv csv{"n", "g_star", "delta", "residual", "oracle_gap", "multiplicity", "accepted", "note"};
  std::vector<JuddPoint> all = found.points;
  all.insert(all.end(), found.rejected.begin(), found.rejected.end());
  std::sort(all.begin(), all.end(), [](const JuddPoint& a, const JuddPoint& b) { return a.g_star < b.g_star; });
  for (const JuddPoint& pt : all) {
    csv.cell(pt.n)
        .cell(pt.g_star * o.omega)
        .cell(pt.delta * o.omega)
        .cell(pt.residual)
        .cell(pt.oracle_gap * o.omega)
        .cell(pt.multiplicity)
        .cell(pt.accepted)
        .cell(pt.note);
    csv.end_row();
  }
  return {csv.str(), 0};
}

inline Outcome nonjuddean(const Options& o) {
  const CouplingRange range{o.g_min / o.omega, o.g_max / o.omega};
  const Parity parity = parse_parity(o.parity);
  const auto found = find_nonjuddean_points(o.n, parity, std::abs(o.delta) / o.omega, range, o.root_tol / o.omega, o.grid);
  Csv csv{"n",          "parity",       "g_star",   "delta", "condition_residual", "oracle_gap_same_parity",
          "oracle_gap_other_parity", "multiplicity", "accepted", "note"};
  std::vector<NonJuddeanPoint> all = found.points;
  all.insert(all.end(), found.rejected.begin(), found.rejected.end());
  std::sort(all.begin(), all.end(),
            [](const NonJuddeanPoint& a, const NonJuddeanPoint& b) { return a.g_star < b.g_star; });
  for (const NonJuddeanPoint& pt : all) {
    csv.cell(pt.n)
        .cell(to_string(pt.parity))
        .cell(pt.g_star * o.omega)
        .cell(pt.delta * o.omega)
        .cell(pt.condition_residual)
        .cell(pt.oracle_gap_same_parity * o.omega)
        .cell(pt.oracle_gap_other_parity * o.omega)
        .cell(pt.multiplicity)
        .cell(pt.accepted)
        .cell(pt.note);
    csv.end_row();
  }
  return {csv.str(), 0};
}

inline SweepConfig sweep_config_of(const Options& o) {
  SweepConfig c;
  for (double g : numeric::linspace(o.grid_g_min, o.grid_g_max, o.g_steps)) c.g_grid.push_back(g / o.omega);
  for (double d : numeric::linspace(o.delta_min, o.delta_max, o.delta_steps)) c.delta_grid.push_back(d / o.omega);
  c.n_max = o.n_max;
  c.predicate_version = parse_predicate_version(o.predicate);
  c.attribution.juddean = parse_juddean_rule(o.attribution_juddean);
  c.attribution.nonjuddean = parse_side(o.attribution_nonjuddean);
  c.scan = scan_of(o);
  c.jobs = o.jobs;
  c.record_timing = o.timestamp;
  validate_sweep_config(c);
  return c;
}

inline Outcome verify(const Options& o) {
  const ConjectureReport report = sweep(sweep_config_of(o));
  int code = 0;
  if (report.summary.errored_points > 0) {
    code = 1;
  } else if (report.summary.violating_points > 0) {
    code = 2;
  }
  return {report_serialize(report), code};
}

inline Outcome crosscheck_cmd(const Options& o, std::ostream& err) {
  const ModelParams p = params_of(o);
  const DiffReport rep = crosscheck(p, o.n_max, o.tol * o.omega, scan_of(o));
  Csv csv{"parity", "gfunction_energy", "oracle_energy", "deviation", "status"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const RecordMatch& m : rep.matches) {
    csv.cell(to_string(m.gfunction.parity))
        .cell(m.gfunction.energy)
        .cell(m.oracle.energy)
        .cell(m.deviation)
        .cell(m.deviation > rep.tol ? "mismatch" : "matched");
    csv.end_row();
  }
  for (const EigenvalueRecord& r : rep.unmatched_gfunction) {
    csv.cell(to_string(r.parity)).cell(r.energy).cell(nan).cell(nan).cell("unmatched_gfunction");
    csv.end_row();
  }
  for (const EigenvalueRecord& r : rep.unmatched_oracle) {
    csv.cell(to_string(r.parity)).cell(nan).cell(r.energy).cell(nan).cell("unmatched_oracle");
    csv.end_row();
  }
  err << (rep.pass ? "PASS" : "FAIL") << ": " << rep.matches.size() << " matched, " << rep.mismatches
      << " above tol, " << rep.unmatched_gfunction.size() + rep.unmatched_oracle.size()
      << " unmatched, max deviation " << format_double(rep.max_deviation) << "\n";
  return {csv.str(), rep.pass ? 0 : 1};
}

inline Outcome asymptotic(const Options& o) {
  std::vector<double> gs;
  for (double g : o.g_values) gs.push_back(g / o.omega);
  const SplittingTable table = asymptotic_check(std::abs(o.delta) / o.omega, gs, o.n_max);
  if (o.format == "json") {
    json_io::Json rows = json_io::Json::array();
    for (const SplittingRow& r : table.rows) {
      json_io::Json s = json_io::Json::array();
      for (double v : r.splittings) s.push_back(v * o.omega);
      json_io::Json row{{"g", r.g * o.omega}, {"splittings", s}, {"ok", r.ok}};
      if (!r.ok) row["error"] = r.error;
      rows.push_back(row);
    }
    json_io::Json doc{{"delta", table.delta * o.omega},
                      {"n_max", table.n_max},
                      {"rows", rows},
                      {"decay_rate", table.decay_rate},
                      {"decay_intercept", table.decay_intercept}};
    return {json_io::to_string(doc), 0};
  }
  Csv csv{"g", "n", "splitting"};
  for (const SplittingRow& r : table.rows) {
    for (std::size_t n = 0; n < r.splittings.size(); ++n) {
      csv.cell(r.g * o.omega).cell(static_cast<int>(n)).cell(r.splittings[n] * o.omega);
      csv.end_row();
    }
  }
  return {csv.str(), 0};
}

inline std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected key=value", 0);
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

// Appends config entries for options absent from the command line, so CLI11
// validates them exactly like flags.
inline std::vector<std::string> merge_config(std::vector<std::string> args, const CLI::App& sub,
                                             const std::string& path) {
  for (const auto& [key, value] : read_config(path)) {
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub.get_option_no_throw(flag);
    if (opt == nullptr || key == "config") throw Error("unknown config key '" + key + "' in " + path);
    bool given = false;
    for (const std::string& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
    if (given) continue;
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1") {
        args.push_back(flag);
      } else if (value != "false" && value != "0") {
        throw Error("config key '" + key + "' expects true or false");
      }
      continue;
    }
    args.push_back(flag);
    if (opt->get_expected_max() > 1) {
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) args.push_back(item);
    } else {
      args.push_back(value);
    }
  }
  return args;
}

}  // namespace detail

inline constexpr const char* kUnits =
    "Energies, g and delta are in units of omega (default 1); --omega sets omega in the same units.";

inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Options o;
  CLI::App app{"Quantum Rabi model spectrum, exceptional points and interval counting.", "rabi"};
  app.require_subcommand(1);
  app.footer(kUnits);

  auto common = [&](CLI::App* sub, bool model) {
    sub->footer(kUnits);
    sub->add_option("--config", o.config_path, "flat key=value file; command-line flags take precedence");
    sub->add_option("--out", o.out_path, "output file (default: standard output)");
    sub->add_option("--omega", o.omega, "oscillator frequency omega")->check(CLI::PositiveNumber);
    if (model) {
      sub->add_option("--g", o.g, "coupling g (energy units)")->required();
      sub->add_option("--delta", o.delta, "qubit splitting delta (energy units)")->required();
    }
  };
  const auto parity_check = CLI::IsMember({"plus", "minus"});
  const auto format_check = CLI::IsMember({"csv", "json"});

  CLI::App* gfunc = app.add_subcommand("gfunc", "tabulate G_parity(x) on a uniform x grid (x = E/omega + (g/omega)^2)");
  common(gfunc, true);
  gfunc->add_option("--parity", o.parity, "plus or minus")->check(parity_check)->capture_default_str();
  gfunc->add_option("--x-min", o.x_min, "first x")->capture_default_str();
  gfunc->add_option("--x-max", o.x_max, "last x")->capture_default_str();
  gfunc->add_option("--points", o.points, "number of rows")->check(CLI::PositiveNumber)->capture_default_str();
  gfunc->add_option("--eps", o.eps, "series relative tolerance")->check(CLI::PositiveNumber)->capture_default_str();

  CLI::App* spectrum =
      app.add_subcommand("spectrum", "eigenvalues with x below n-max from G-function roots and baseline checks");
  common(spectrum, true);
  spectrum->add_option("--n-max", o.n_max, "highest baseline (x ceiling)")->check(CLI::Range(1, kMaxSpectrumBaselines))->capture_default_str();
  spectrum->add_option("--format", o.format, "csv or json")->check(format_check)->capture_default_str();
  spectrum->add_option("--points", o.scan_points, "scan points per interval")->check(CLI::Range(3, 100000))->capture_default_str();

  CLI::App* oracle = app.add_subcommand("oracle", "eigenvalues below e-max from truncated Fock diagonalization");
  common(oracle, true);
  oracle->add_option("--e-max", o.e_max, "energy ceiling")->capture_default_str();
  oracle->add_option("--tol", o.tol, "truncation convergence tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  oracle->add_option("--format", o.format, "csv or json")->check(format_check)->capture_default_str();

  CLI::App* judd = app.add_subcommand("judd", "Juddean points of baseline n along g at fixed delta");
  common(judd, false);
  judd->add_option("--n", o.n, "baseline index")->check(CLI::NonNegativeNumber)->capture_default_str();
  judd->add_option("--delta", o.delta, "qubit splitting delta (energy units)")->required();
  judd->add_option("--g-min", o.g_min, "lower end of the g range")->capture_default_str();
  judd->add_option("--g-max", o.g_max, "upper end of the g range")->capture_default_str();
  judd->add_option("--grid", o.grid, "scan points along g")->check(CLI::Range(3, 1000000))->capture_default_str();
  judd->add_option("--tol", o.root_tol, "bisection tolerance in g")->check(CLI::PositiveNumber)->capture_default_str();

  CLI::App* nonjudd = app.add_subcommand("nonjuddean", "non-Juddean points of one parity at baseline n along g");
  common(nonjudd, false);
  nonjudd->add_option("--n", o.n, "baseline index")->check(CLI::NonNegativeNumber)->capture_default_str();
  nonjudd->add_option("--parity", o.parity, "plus or minus")->check(parity_check)->capture_default_str();
  nonjudd->add_option("--delta", o.delta, "qubit splitting delta (energy units)")->required();
  nonjudd->add_option("--g-min", o.g_min, "lower end of the g range")->capture_default_str();
  nonjudd->add_option("--g-max", o.g_max, "upper end of the g range")->capture_default_str();
  nonjudd->add_option("--grid", o.grid, "scan points along g")->check(CLI::Range(3, 1000000))->capture_default_str();
  nonjudd->add_option("--tol", o.root_tol, "bisection tolerance in g")->check(CLI::PositiveNumber)->capture_default_str();

  CLI::App* verify = app.add_subcommand(
      "verify", "interval-counting predicate over a (g, delta) grid; JSON report; exit 2 on violations");
  common(verify, false);
  verify->add_option("--g-min", o.grid_g_min, "first g")->capture_default_str();
  verify->add_option("--g-max", o.grid_g_max, "last g")->capture_default_str();
  verify->add_option("--g-steps", o.g_steps, "number of g values")->check(CLI::PositiveNumber)->capture_default_str();
  verify->add_option("--delta-min", o.delta_min, "first delta")->capture_default_str();
  verify->add_option("--delta-max", o.delta_max, "last delta")->capture_default_str();
  verify->add_option("--delta-steps", o.delta_steps, "number of delta values")->check(CLI::PositiveNumber)->capture_default_str();
  verify->add_option("--n-max", o.n_max, "intervals 0 .. n-max - 1 are counted")->check(CLI::Range(1, kMaxSpectrumBaselines))->capture_default_str();
  verify->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  verify->add_option("--predicate", o.predicate, "classic or extended")->check(CLI::IsMember({"classic", "extended"}))->capture_default_str();
  verify->add_option("--attribution-juddean", o.attribution_juddean, "split, left or right")->check(CLI::IsMember({"split", "left", "right"}))->capture_default_str();
  verify->add_option("--attribution-nonjuddean", o.attribution_nonjuddean, "left or right")->check(CLI::IsMember({"left", "right"}))->capture_default_str();
  verify->add_option("--points", o.scan_points, "scan points per interval")->check(CLI::Range(3, 100000))->capture_default_str();
  verify->add_flag("--timestamp", o.timestamp, "record per-point and total wall-clock time in the report");

  CLI::App* cross = app.add_subcommand(
      "crosscheck", "match G-function spectrum against the oracle below x = n-max; exit 1 on FAIL");
  common(cross, true);
  cross->add_option("--n-max", o.n_max, "x ceiling")->check(CLI::Range(1, kMaxSpectrumBaselines))->capture_default_str();
  cross->add_option("--tol", o.tol, "allowed energy deviation")->check(CLI::PositiveNumber)->capture_default_str();
  cross->add_option("--points", o.scan_points, "scan points per interval")->check(CLI::Range(3, 100000))->capture_default_str();

  CLI::App* asym = app.add_subcommand("asymptotic", "parity splittings s_n(g) at fixed delta for g >= 1.5");
  common(asym, false);
  asym->add_option("--delta", o.delta, "qubit splitting delta (energy units)")->required();
  asym->add_option("--g-values", o.g_values, "ascending g values")->delimiter(',')->capture_default_str();
  asym->add_option("--n-max", o.n_max, "levels per parity")->check(CLI::Range(1, kMaxSpectrumBaselines))->capture_default_str();
  asym->add_option("--format", o.format, "csv or json (json adds the fitted decay rate)")->check(format_check)->capture_default_str();

  try {
    // The config path is needed before parsing, to merge its entries in.
    std::string config_path;
    CLI::App* chosen = nullptr;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (chosen == nullptr && !args[i].empty() && args[i][0] != '-') {
        chosen = app.get_subcommand_no_throw(args[i]);
      }
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!config_path.empty() && chosen != nullptr) args = detail::merge_config(args, *chosen, config_path);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    Outcome result;
    if (gfunc->parsed()) {
      result = detail::gfunc(o);
    } else if (spectrum->parsed()) {
      result = detail::spectrum(o);
    } else if (oracle->parsed()) {
      result = detail::oracle(o);
    } else if (judd->parsed()) {
      result = detail::judd(o);
    } else if (nonjudd->parsed()) {
      result = detail::nonjuddean(o);
    } else if (verify->parsed()) {
      result = detail::verify(o);
    } else if (cross->parsed()) {
      result = detail::crosscheck_cmd(o, err);
    } else {
      result = detail::asymptotic(o);
    }
    if (o.out_path.empty()) {
      out << result.artifact;
      out.flush();
    } else {
      std::ofstream file(o.out_path, std::ios::binary);
      file << result.artifact;
      if (!file) throw Error("cannot write " + o.out_path);
    }
    return result.exit_code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args), out, err);
}

}  // namespace rabi::cli

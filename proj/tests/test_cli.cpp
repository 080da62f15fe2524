#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch_amalgamated.hpp>

#include "rabi/cli.hpp"

using Catch::Matchers::ContainsSubstring;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = rabi::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("gfunc writes one row per grid point") {
  const Run r = run({"gfunc", "--g", "0.7", "--delta", "0.4", "--x-min", "0.05", "--x-max", "0.95", "--points", "181"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 182);
  CHECK(rows[0] == "x,G,error_estimate");
  CHECK(r.out.find('\r') == std::string::npos);
  CHECK(r.out.back() == '\n');
}

TEST_CASE("numbers carry 17 significant digits") {
  const Run r = run({"oracle", "--g", "0.7", "--delta", "0.4", "--e-max", "0.0"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() >= 2);
  const std::string energy = rows[1].substr(0, rows[1].find(','));
  std::string digits;
  for (char c : energy.substr(0, energy.find_first_of("eE"))) {
    if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
  }
  digits.erase(0, digits.find_first_not_of('0'));
  CHECK(digits.size() == 17);
  CHECK(std::stod(energy) == rabi::oracle_spectrum(rabi::make_params(1.0, 0.7, 0.4), 0.0, 1e-8).records[0].energy);
}

TEST_CASE("spectrum at delta = 0 lists exceptional pairs") {
  const Run r = run({"spectrum", "--g", "0.5", "--delta", "0", "--n-max", "4", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 8);
  for (const auto& rec : j) CHECK(rec["classification"] == "exceptional_juddean");
}

TEST_CASE("every CSV subcommand writes its header") {
  const std::vector<std::pair<std::vector<std::string>, std::string>> cases{
      {{"spectrum", "--g", "0.7", "--delta", "0.4", "--n-max", "2"}, "energy,x,parity,classification"},
      {{"oracle", "--g", "0.7", "--delta", "0.4", "--e-max", "-5"}, "energy,x,parity,classification"},
      {{"judd", "--n", "0", "--delta", "0.5"}, "n,g_star,delta,residual"},
      {{"nonjuddean", "--n", "0", "--delta", "0.5", "--g-max", "0.5"}, "n,parity,g_star"},
      {{"asymptotic", "--delta", "0.5", "--n-max", "2"}, "g,n,splitting"},
  };
  for (const auto& [args, header] : cases) {
    const Run r = run(args);
    INFO(args[0]);
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind(header, 0) == 0);
  }
}

TEST_CASE("judd output in omega units") {
  const Run one = run({"judd", "--n", "1", "--delta", "0.5", "--g-max", "1.5"});
  const Run two = run({"judd", "--n", "1", "--delta", "1.0", "--g-max", "3.0", "--omega", "2"});
  REQUIRE(one.code == 0);
  REQUIRE(two.code == 0);
  const auto a = lines(one.out);
  const auto b = lines(two.out);
  REQUIRE(a.size() == 2);
  REQUIRE(b.size() == 2);
  const double g1 = std::stod(a[1].substr(a[1].find(',') + 1));
  const double g2 = std::stod(b[1].substr(b[1].find(',') + 1));
  // Both runs bisect to 1e-10 in scaled g.
  CHECK_THAT(g2, Catch::Matchers::WithinAbs(2.0 * g1, 4e-10));
}

TEST_CASE("config files merge under command-line flags") {
  const auto cfg = write_temp("rabi_test_cfg.txt", "# comment\ng = 0.7\ndelta=0.4\npoints = 5\nx-max = 0.5\n");
  const Run from_file = run({"gfunc", "--config", cfg.string()});
  REQUIRE(from_file.code == 0);
  CHECK(lines(from_file.out).size() == 6);

  const Run overridden = run({"gfunc", "--config", cfg.string(), "--points", "3"});
  REQUIRE(overridden.code == 0);
  CHECK(lines(overridden.out).size() == 4);

  const Run direct = run({"gfunc", "--g", "0.7", "--delta", "0.4", "--points", "5", "--x-max", "0.5"});
  CHECK(direct.out == from_file.out);
}

TEST_CASE("config file errors exit 1") {
  const auto unknown = write_temp("rabi_test_unknown.txt", "g = 0.7\ndelta = 0.4\nfrobnicate = 3\n");
  const Run a = run({"gfunc", "--config", unknown.string()});
  CHECK(a.code == 1);
  CHECK_THAT(a.err, ContainsSubstring("frobnicate"));

  const auto bad = write_temp("rabi_test_bad.txt", "g 0.7\n");
  CHECK(run({"gfunc", "--config", bad.string()}).code == 1);
  CHECK(run({"gfunc", "--config", "/nonexistent/rabi.cfg"}).code == 1);
}

TEST_CASE("invalid flags exit 1") {
  CHECK(run({"gfunc", "--g", "0.7"}).code == 1);
  CHECK(run({"gfunc", "--g", "0.7", "--delta", "0.4", "--parity", "up"}).code == 1);
  CHECK(run({"spectrum", "--g", "0.7", "--delta", "0.4", "--n-max", "0"}).code == 1);
  CHECK(run({"oracle", "--g", "0.7", "--delta", "0.4", "--omega", "-1"}).code == 1);
  CHECK(run({"judd", "--n", "1", "--delta", "0"}).code == 1);
  CHECK(run({}).code == 1);
}

TEST_CASE("help documents units") {
  for (const std::string sub : {"gfunc", "spectrum", "oracle", "judd", "nonjuddean", "verify", "crosscheck", "asymptotic"}) {
    const Run r = run({sub, "--help"});
    INFO(sub);
    CHECK(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("omega"));
  }
}

TEST_CASE("verify exit codes") {
  const Run ok = run({"verify", "--g-min", "0.7", "--g-max", "0.7", "--g-steps", "1", "--delta-min", "0.4",
                      "--delta-max", "0.4", "--delta-steps", "1", "--n-max", "4"});
  CHECK(ok.code == 0);
  CHECK(rabi::report_parse(ok.out).summary.total_points == 1);

  // Not reachable through flag validation; set the option directly.
  rabi::cli::Options o;
  o.g_steps = o.delta_steps = 1;
  o.n_max = 2;
  o.scan_points = 2;
  const rabi::cli::Outcome errored = rabi::cli::detail::verify(o);
  CHECK(errored.exit_code == 1);
  CHECK_THAT(errored.artifact, ContainsSubstring("ERRORED"));
}

TEST_CASE("crosscheck reports PASS") {
  const Run r = run({"crosscheck", "--g", "0.7", "--delta", "0.4", "--n-max", "4"});
  CHECK(r.code == 0);
  CHECK(r.err.rfind("PASS", 0) == 0);
  CHECK(r.out.rfind("parity,gfunction_energy,oracle_energy,deviation,status\n", 0) == 0);
}

TEST_CASE("repeated invocations are byte identical") {
  const std::vector<std::string> args{"verify", "--g-min", "0.3", "--g-max", "0.9", "--g-steps", "3",
                                      "--delta-min", "0.2", "--delta-max", "0.6", "--delta-steps", "2",
                                      "--n-max", "3", "--jobs", "2"};
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.out == b.out);
  CHECK(a.code == b.code);
}

TEST_CASE("--out writes the artifact to a file") {
  const auto path = std::filesystem::temp_directory_path() / "rabi_test_out.csv";
  std::filesystem::remove(path);
  const Run r = run({"gfunc", "--g", "0.7", "--delta", "0.4", "--points", "3", "--out", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path, std::ios::binary);
  const std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(lines(body).size() == 4);
}

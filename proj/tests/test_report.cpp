#include <string>

#include <catch_amalgamated.hpp>

#include "rabi/report.hpp"

using namespace rabi;
using Catch::Matchers::ContainsSubstring;

namespace {

ConjectureReport small_report() {
  SweepConfig c;
  c.g_grid = {0.3, 0.43301270189123198};
  c.delta_grid = {0.5};
  c.n_max = 3;
  return sweep(c);
}

}  // namespace

TEST_CASE("report survives a serialize and parse round trip") {
  const ConjectureReport r = small_report();
  const std::string text = report_serialize(r);
  const ConjectureReport back = report_parse(text);
  CHECK(back == r);
  CHECK(report_serialize(back) == text);
}

TEST_CASE("serialized form is stable and ends with a newline") {
  const std::string a = report_serialize(small_report());
  const std::string b = report_serialize(small_report());
  CHECK(a == b);
  REQUIRE_FALSE(a.empty());
  CHECK(a.back() == '\n');
  CHECK(a.find('\r') == std::string::npos);
  CHECK_THAT(a, ContainsSubstring("\"version\": \"1\""));
  CHECK_THAT(a, !ContainsSubstring("\"jobs\""));
}

TEST_CASE("timing fields are written only on request") {
  SweepConfig c;
  c.g_grid = {0.6};
  c.delta_grid = {0.4};
  c.n_max = 2;
  c.record_timing = true;
  const ConjectureReport r = sweep(c);
  REQUIRE(r.summary.runtime_seconds.has_value());
  const std::string text = report_serialize(r);
  CHECK_THAT(text, ContainsSubstring("runtime_seconds"));
  CHECK(report_parse(text) == r);
}

TEST_CASE("errored points keep their message") {
  SweepConfig c;
  c.g_grid = {0.5};
  c.delta_grid = {0.5};
  c.n_max = 2;
  c.scan.points = 2;
  const ConjectureReport r = sweep(c);
  REQUIRE(r.points[0].status == PointStatus::Errored);
  const std::string text = report_serialize(r);
  CHECK_THAT(text, ContainsSubstring("ERRORED"));
  const ConjectureReport back = report_parse(text);
  CHECK(back == r);
  CHECK(back.points[0].error == r.points[0].error);
}

TEST_CASE("truncated input reports a byte offset") {
  const std::string text = report_serialize(small_report());
  const std::string cut = text.substr(0, text.size() / 2);
  try {
    report_parse(cut);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() > 0);
    CHECK(e.offset() <= cut.size() + 1);
  }
}

TEST_CASE("missing fields name their path") {
  std::string text = report_serialize(small_report());
  const std::string key = "\"n_max\"";
  const auto at = text.find(key);
  REQUIRE(at != std::string::npos);
  text.replace(at, key.size(), "\"n_maxx\"");
  try {
    report_parse(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK_THAT(std::string(e.what()), ContainsSubstring("$.config.n_max"));
  }
}

TEST_CASE("unknown versions are rejected") {
  std::string text = report_serialize(small_report());
  const auto at = text.find("\"version\": \"1\"");
  REQUIRE(at != std::string::npos);
  text.replace(at, 14, "\"version\": \"9\"");
  CHECK_THROWS_AS(report_parse(text), ParseError);
}

#include <algorithm>
#include <cmath>
#include <vector>

#include <catch_amalgamated.hpp>

#include "rabi/oracle.hpp"
#include "support/oracle_locators.hpp"

using namespace rabi;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<double> energies(const OracleSpectrum& s, std::optional<Parity> only = std::nullopt) {
  std::vector<double> out;
  for (const EigenvalueRecord& r : s.records) {
    if (!only || r.parity == *only) out.push_back(r.energy);
  }
  return out;
}

}  // namespace

TEST_CASE("decoupled matrix is diagonal with alternating splitting") {
  const ParityMatrix m = build_parity_matrix(Parity::Plus, make_params(1.0, 0.0, 0.4), 4);
  REQUIRE(m.diagonal.size() == 4);
  const std::vector<double> want{0.4, 0.6, 2.4, 2.6};
  for (int k = 0; k < 4; ++k) CHECK_THAT(m.diagonal[k], WithinAbs(want[k], 1e-15));
  for (double o : m.offdiagonal) CHECK(o == 0.0);
  const std::vector<double> low = lowest_eigenvalues(m, 2);
  CHECK_THAT(low[0], WithinAbs(0.4, 1e-14));
  CHECK_THAT(low[1], WithinAbs(0.6, 1e-14));
}

TEST_CASE("ladder matrix elements") {
  const ParityMatrix m = build_parity_matrix(Parity::Minus, make_params(1.0, 0.5, 0.0), 3);
  REQUIRE(m.offdiagonal.size() == 2);
  CHECK_THAT(m.offdiagonal[0], WithinAbs(0.5, 1e-15));
  CHECK_THAT(m.offdiagonal[1], WithinAbs(0.5 * std::sqrt(2.0), 1e-15));
  CHECK_THROWS_AS(build_parity_matrix(Parity::Plus, make_params(1.0, 0.5, 0.0), 1), InvalidTruncation);
}

TEST_CASE("displaced oscillator levels at delta = 0") {
  const std::vector<double> low = lowest_eigenvalues(build_parity_matrix(Parity::Plus, make_params(1.0, 1.0, 0.0), 150), 5);
  for (int k = 0; k < 5; ++k) CHECK_THAT(low[k], WithinAbs(k - 1.0, 1e-9));
}

TEST_CASE("pinned levels at g=0.7, delta=0.4, M=200") {
  // Agree with M = 300 to 1e-13.
  const std::vector<double> plus{-0.427043674566187, 0.673603825027015, 1.36075683213172, 2.54523096551277,
                                 3.56690383546126,  4.40562909759678,  5.62862108823447, 6.41072050172306,
                                 7.55923952893443,  8.50780515270724,  9.4686623379783,  10.5891934071644};
  const std::vector<double> minus{-0.707805064098488, 0.370949763390692, 1.63701037064434, 2.46669570206541,
                                  3.46112669606657,   4.62158681644601,  5.38933993204254, 6.60223418625305,
                                  7.45570734733344,   8.51199112432016,  9.55482233107944, 10.4349704928984};
  const ModelParams p = make_params(1.0, 0.7, 0.4);
  const auto a = lowest_eigenvalues(build_parity_matrix(Parity::Plus, p, 200), 12);
  const auto b = lowest_eigenvalues(build_parity_matrix(Parity::Minus, p, 200), 12);
  const auto a300 = lowest_eigenvalues(build_parity_matrix(Parity::Plus, p, 300), 12);
  for (int k = 0; k < 12; ++k) {
    CHECK_THAT(a[k], WithinAbs(plus[k], 1e-12));
    CHECK_THAT(b[k], WithinAbs(minus[k], 1e-12));
    CHECK_THAT(a[k], WithinAbs(a300[k], 1e-10));
  }
}

TEST_CASE("sector matrices agree with an independent construction") {
  for (double g : {0.3, 1.1, 2.2}) {
    for (double d : {0.2, 0.9}) {
      const ModelParams p = make_params(1.0, g, d);
      const auto lib = lowest_eigenvalues(build_parity_matrix(Parity::Plus, p, 180), 20);
      const auto ind = ref::sector_spectrum(g, d, +1, 180);
      for (int k = 0; k < 20; ++k) CHECK_THAT(lib[k], WithinAbs(ind[k], 1e-10));
    }
  }
}

TEST_CASE("delta = 0 closed form") {
  const OracleSpectrum s = oracle_spectrum(make_params(1.0, 0.5, 0.0), 3.5, 1e-12);
  REQUIRE(s.records.size() == 8);
  for (int k = 0; k < 4; ++k) {
    CHECK_THAT(s.records[2 * k].energy, WithinAbs(k - 0.25, 1e-15));
    CHECK(s.records[2 * k].parity == Parity::Plus);
    CHECK_THAT(s.records[2 * k + 1].energy, WithinAbs(k - 0.25, 1e-15));
    CHECK(s.records[2 * k + 1].parity == Parity::Minus);
  }
}

TEST_CASE("g = 0 closed form") {
  const OracleSpectrum s = oracle_spectrum(make_params(1.0, 0.0, 0.4), 2.0, 1e-12);
  const std::vector<double> want{-0.4, 0.4, 0.6, 1.4, 1.6};
  const std::vector<Parity> parity{Parity::Minus, Parity::Plus, Parity::Plus, Parity::Minus, Parity::Minus};
  REQUIRE(s.records.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK_THAT(s.records[i].energy, WithinAbs(want[i], 1e-15));
    CHECK(s.records[i].parity == parity[i]);
    CHECK(s.records[i].source == Source::Oracle);
  }
}

TEST_CASE("pinned spectrum at g=1.2, delta=0.9") {
  const std::vector<std::pair<double, Parity>> want{
      {-1.67332631715728, Parity::Minus}, {-1.55441948912184, Parity::Plus}, {-0.835370858826022, Parity::Minus},
      {-0.429183043964279, Parity::Plus}, {0.263738065126331, Parity::Minus}, {0.789139376832493, Parity::Plus},
      {1.54464744619645, Parity::Minus},  {1.58872202786281, Parity::Plus},   {2.35367242008588, Parity::Plus},
      {2.79129540970573, Parity::Minus},  {3.39404894158177, Parity::Minus},  {3.67491387467245, Parity::Plus}};
  const OracleSpectrum s = oracle_spectrum(make_params(1.0, 1.2, 0.9), 4.0, 1e-10);
  CHECK(s.convergence_gap < 1e-10);
  REQUIRE(s.records.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK_THAT(s.records[i].energy, WithinAbs(want[i].first, 1e-12));
    CHECK(s.records[i].parity == want[i].second);
  }
}

TEST_CASE("records sorted with Plus first on ties") {
  const OracleSpectrum s = oracle_spectrum(make_params(1.0, 0.9, 0.0), 4.0, 1e-12);
  CHECK(std::is_sorted(s.records.begin(), s.records.end(), record_less));
  CHECK(s.records.front().parity == Parity::Plus);
}

TEST_CASE("degeneracy gap examples") {
  const ModelParams p = make_params(1.0, 0.8, 0.0);
  const DegeneracyGap gap = degeneracy_gap(p, baseline_energy(2, p), 1e-12);
  CHECK(gap.plus < 1e-10);
  CHECK(gap.minus < 1e-10);

  // Baseline 1 Juddean point, 4 g^2 + delta^2 = 1.
  const ModelParams j = make_params(1.0, std::sqrt(0.75) / 2.0, 0.5);
  const DegeneracyGap jg = degeneracy_gap(j, baseline_energy(1, j), 1e-12);
  CHECK(jg.plus < 1e-8);
  CHECK(jg.minus < 1e-8);
}

TEST_CASE("variational monotonicity in the truncation") {
  for (double g : {0.6, 1.4, 2.5}) {
    const ModelParams p = make_params(1.0, g, 0.7);
    for (Parity par : {Parity::Plus, Parity::Minus}) {
      std::vector<double> prev;
      for (int M : {120, 180, 240}) {
        const auto cur = lowest_eigenvalues(build_parity_matrix(par, p, M), 30);
        if (!prev.empty()) {
          for (int k = 0; k < 30; ++k) CHECK(cur[k] <= prev[k] + 1e-12);
        }
        prev = cur;
      }
    }
  }
}

TEST_CASE("spectrum symmetric under coupling and splitting sign flips") {
  const OracleSpectrum base = oracle_spectrum(ModelParams{1.0, 0.9, 0.6}, 5.0, 1e-11);
  const OracleSpectrum g_flip = oracle_spectrum(ModelParams{1.0, -0.9, 0.6}, 5.0, 1e-11);
  const OracleSpectrum d_flip = oracle_spectrum(ModelParams{1.0, 0.9, -0.6}, 5.0, 1e-11);
  REQUIRE(base.records.size() == g_flip.records.size());
  REQUIRE(base.records.size() == d_flip.records.size());
  for (std::size_t i = 0; i < base.records.size(); ++i) {
    CHECK_THAT(g_flip.records[i].energy, WithinAbs(base.records[i].energy, 1e-10));
    CHECK(g_flip.records[i].parity == base.records[i].parity);
  }
  const auto plus = energies(base, Parity::Plus);
  const auto flipped_minus = energies(d_flip, Parity::Minus);
  REQUIRE(plus.size() == flipped_minus.size());
  for (std::size_t i = 0; i < plus.size(); ++i) CHECK_THAT(flipped_minus[i], WithinAbs(plus[i], 1e-10));
}

TEST_CASE("parity sectors together reproduce the two-component Hamiltonian") {
  for (double g : {0.4, 1.3}) {
    for (double d : {0.3, 1.1}) {
      const OracleSpectrum s = oracle_spectrum(make_params(1.0, g, d), 6.0, 1e-11);
      std::vector<double> full = ref::full_spectrum(g, d, 160);
      std::vector<double> mine = energies(s);
      std::sort(mine.begin(), mine.end());
      REQUIRE(full.size() >= mine.size());
      for (std::size_t i = 0; i < mine.size(); ++i) CHECK_THAT(mine[i], WithinAbs(full[i], 1e-9));
      // Nothing below the window is missing.
      CHECK(full[mine.size()] > 6.0 - 1e-9);
    }
  }
}

TEST_CASE("oracle input validation") {
  CHECK_THROWS_AS(oracle_spectrum(make_params(1.0, 0.5, 0.5), std::nan(""), 1e-10), InvalidParameter);
  CHECK_THROWS_AS(oracle_spectrum(make_params(1.0, 0.5, 0.5), 3.0, 0.0), InvalidParameter);
  // Far above what 1200 Fock levels can resolve at this precision.
  CHECK_THROWS_AS(oracle_spectrum(make_params(1.0, 8.0, 0.5), 700.0, 1e-12), TruncationExceeded);
}

#pragma once

// Truncated Fock-space reference spectrum. Each parity sector
//
//   H_{+/-} = a^dag a + g (a + a^dag) +/- delta (-1)^{a^dag a}   (omega = 1)
//
// is tridiagonal in the number basis; the lowest M levels are kept and the
// matrix is diagonalized densely. Energies leave this module in omega units.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "rabi/errors.hpp"
#include "rabi/model.hpp"

namespace rabi {

inline constexpr int kOracleStartM = 120;
inline constexpr int kOracleStepM = 60;
inline constexpr int kOracleCapM = 1200;

enum class Classification { Regular, ExceptionalJuddean, ExceptionalNonJuddean };
enum class Source { GFunction, Oracle };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::Regular: return "regular";
    case Classification::ExceptionalJuddean: return "exceptional_juddean";
    case Classification::ExceptionalNonJuddean: return "exceptional_nonjuddean";
  }
  return "?";
}

inline const char* to_string(Source s) { return s == Source::GFunction ? "gfunction" : "oracle"; }

inline bool is_exceptional(Classification c) { return c != Classification::Regular; }

// One spectral line.
struct EigenvalueRecord {
  double energy = 0.0;  // omega units
  ScaledEnergy x;
  Parity parity = Parity::Plus;
  Classification classification = Classification::Regular;
  int interval_index = 0;  // floor(x); -1 below the first pole
  Source source = Source::Oracle;
  double uncertainty = 0.0;
  bool suspicious = false;

  bool operator==(const EigenvalueRecord&) const = default;
};

// Ascending energy, Plus before Minus on ties.
inline bool record_less(const EigenvalueRecord& a, const EigenvalueRecord& b) {
  if (a.energy != b.energy) return a.energy < b.energy;
  return parity_less(a.parity, b.parity);
}

inline int interval_of(double x) { return static_cast<int>(std::floor(x)); }

struct ParityMatrix {
  Parity parity = Parity::Plus;
  int dim = 0;
  std::vector<double> diagonal;
  std::vector<double> offdiagonal;
};

struct OracleSpectrum {
  ModelParams params;
  int M = 0;
  std::vector<EigenvalueRecord> records;
  double convergence_gap = 0.0;
};

// Matrix entries are in omega units; `parity` is in the caller's convention.
inline ParityMatrix build_parity_matrix(Parity parity, const ModelParams& params, int M) {
  if (M < 2) throw InvalidTruncation(M);
  const ModelParams p = validate(params);
  const double s = sign_of(sector(p, parity));
  ParityMatrix out;
  out.parity = parity;
  out.dim = M;
  out.diagonal.resize(static_cast<std::size_t>(M));
  out.offdiagonal.resize(static_cast<std::size_t>(M - 1));
  for (int k = 0; k < M; ++k) {
    const double alt = (k % 2 == 0) ? 1.0 : -1.0;
    out.diagonal[static_cast<std::size_t>(k)] = p.omega * k + s * p.delta * alt;
  }
  for (int k = 0; k + 1 < M; ++k) {
    out.offdiagonal[static_cast<std::size_t>(k)] = p.g * std::sqrt(static_cast<double>(k + 1));
  }
  return out;
}

// The k smallest eigenvalues, ascending. Uses Eigen's implicit symmetric QR
// on the tridiagonal form (backward stable: each computed eigenvalue is exact
// for a matrix within O(eps ||H||)).
inline std::vector<double> lowest_eigenvalues(const ParityMatrix& matrix, int k) {
  if (k < 0 || k > matrix.dim) throw Error("requested eigenvalue count outside [0, dim]");
  if (k == 0) return {};
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(matrix.diagonal.data(), matrix.dim);
  Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(matrix.offdiagonal.data(), matrix.dim - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("tridiagonal eigensolver failed to converge");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + k);
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

inline std::vector<double> sector_levels_below(Parity parity, const ModelParams& p, int M, double e_max) {
  const ParityMatrix mat = build_parity_matrix(parity, p, M);
  std::vector<double> all = lowest_eigenvalues(mat, M);
  all.erase(std::find_if(all.begin(), all.end(), [&](double e) { return e > e_max; }), all.end());
  return all;
}

inline EigenvalueRecord oracle_record(double energy, Parity parity, const ModelParams& p, double uncertainty) {
  EigenvalueRecord r;
  r.energy = energy;
  r.x = scaled_x(energy, p);
  r.parity = parity;
  r.interval_index = interval_of(r.x.x);
  r.source = Source::Oracle;
  r.uncertainty = uncertainty;
  return r;
}

inline void finish(OracleSpectrum& s) { std::sort(s.records.begin(), s.records.end(), record_less); }

// g == 0 or delta == 0: the spectrum is known in closed form.
inline OracleSpectrum closed_form_spectrum(const ModelParams& p, double e_max) {
  OracleSpectrum out;
  out.params = p;
  const double w = p.omega;
  if (p.g == 0.0) {
    for (Parity parity : {Parity::Plus, Parity::Minus}) {
      const double s = sign_of(sector(p, parity));
      for (int k = 0;; ++k) {
        const double e = w * k + s * p.delta * ((k % 2 == 0) ? 1.0 : -1.0);
        if (w * k - p.delta > e_max) break;
        if (e > e_max) continue;
        EigenvalueRecord r = oracle_record(e, parity, p, 0.0);
        if (p.delta == 0.0) r.classification = Classification::ExceptionalJuddean;
        out.records.push_back(r);
      }
    }
  } else {
    for (int k = 0;; ++k) {
      const double e = baseline_energy(k, p);
      if (e > e_max) break;
      for (Parity parity : {Parity::Plus, Parity::Minus}) {
        EigenvalueRecord r = oracle_record(e, parity, p, 0.0);
        r.x = ScaledEnergy{static_cast<double>(k)};
        r.interval_index = k;
        r.classification = Classification::ExceptionalJuddean;
        out.records.push_back(r);
      }
    }
  }
  finish(out);
  return out;
}

}  // namespace detail

// Both parity sectors below e_max, refined in M until consecutive truncations
// (M and M + 60) agree to `tol` on every reported level.
inline OracleSpectrum oracle_spectrum(const ModelParams& params, double e_max, double tol) {
  if (!std::isfinite(e_max)) throw InvalidParameter("e_max", e_max);
  if (!(tol > 0.0)) throw InvalidParameter("tol", tol);
  const ModelParams p = validate(params);
  if (p.g == 0.0 || p.delta == 0.0) return detail::closed_form_spectrum(p, e_max);

  for (int M = kOracleStartM; M + kOracleStepM <= kOracleCapM; M += kOracleStepM) {
    double gap = 0.0;
    bool ok = true;
    OracleSpectrum out;
    out.params = p;
    out.M = M + kOracleStepM;
    for (Parity parity : {Parity::Plus, Parity::Minus}) {
      const std::vector<double> coarse = detail::sector_levels_below(parity, p, M, e_max);
      // A level may slip under e_max only in the finer truncation.
      const std::vector<double> fine =
          detail::sector_levels_below(parity, p, M + kOracleStepM, e_max + tol);
      if (fine.size() < coarse.size()) {
        ok = false;
        break;
      }
      for (std::size_t i = 0; i < coarse.size(); ++i) gap = std::max(gap, std::abs(coarse[i] - fine[i]));
      if (fine.size() > coarse.size() && fine[coarse.size()] <= e_max) ok = false;
      for (double e : fine) {
        if (e <= e_max) out.records.push_back(detail::oracle_record(e, parity, p, tol));
      }
    }
    if (ok && gap < tol) {
      out.convergence_gap = gap;
      detail::finish(out);
      return out;
    }
  }
  throw TruncationExceeded(kOracleCapM);
}

struct DegeneracyGap {
  double plus = 0.0;
  double minus = 0.0;

  double of(Parity p) const { return p == Parity::Plus ? plus : minus; }
};

// Distance from e_target to the nearest level of each parity.
inline DegeneracyGap degeneracy_gap(const ModelParams& params, double e_target, double tol) {
  const ModelParams p = validate(params);
  const OracleSpectrum spec = oracle_spectrum(p, e_target + p.omega, tol);
  DegeneracyGap out{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const EigenvalueRecord& r : spec.records) {
    const double d = std::abs(r.energy - e_target);
    if (r.parity == Parity::Plus) {
      out.plus = std::min(out.plus, d);
    } else {
      out.minus = std::min(out.minus, d);
    }
  }
  return out;
}

}  // namespace rabi

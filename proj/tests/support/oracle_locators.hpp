#pragma once

// Reference computations that share no code with the library: Fock-space
// matrices built here from the Hamiltonian, dense Eigen solves, and a Judd
// locator driven purely by level crossings of the baseline.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace ref {

// H = a^dag a + delta sigma_z + g sigma_x (a + a^dag) on the product basis
// |k> (x) {up, down}, k < M, omega = 1. Index 2k is |k, up>.
inline Eigen::MatrixXd full_hamiltonian(double g, double delta, int M) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * M, 2 * M);
  for (int k = 0; k < M; ++k) {
    h(2 * k, 2 * k) = k + delta;
    h(2 * k + 1, 2 * k + 1) = k - delta;
    if (k + 1 < M) {
      const double a = g * std::sqrt(k + 1.0);
      // sigma_x flips the qubit; (a + a^dag) moves k by one.
      h(2 * k, 2 * (k + 1) + 1) = h(2 * (k + 1) + 1, 2 * k) = a;
      h(2 * k + 1, 2 * (k + 1)) = h(2 * (k + 1), 2 * k + 1) = a;
    }
  }
  return h;
}

inline std::vector<double> full_spectrum(double g, double delta, int M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full_hamiltonian(g, delta, M), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

// Parity block: basis |k, (-1)^k s> with s = +1 for the Plus sector. The qubit
// term contributes s (-1)^k delta on the diagonal.
inline std::vector<double> sector_spectrum(double g, double delta, int sign, int M) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(M, M);
  for (int k = 0; k < M; ++k) {
    h(k, k) = k + sign * (k % 2 == 0 ? 1.0 : -1.0) * delta;
    if (k + 1 < M) h(k, k + 1) = h(k + 1, k) = g * std::sqrt(k + 1.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

// Levels of one sector lying below baseline n, E < n - g^2.
inline int levels_below_baseline(double g, double delta, int sign, int n, int M = 160) {
  const double line = n - g * g;
  int count = 0;
  for (double e : sector_spectrum(g, delta, sign, M)) count += e < line ? 1 : 0;
  return count;
}

// g in [lo, hi] where a level of the given sector crosses baseline n, found
// by bisecting on the jump of levels_below_baseline.
inline std::vector<double> baseline_crossings(double delta, int sign, int n, double lo, double hi, int grid,
                                              double tol = 1e-10) {
  std::vector<double> out;
  double prev_g = lo;
  int prev = levels_below_baseline(lo, delta, sign, n);
  for (int i = 1; i <= grid; ++i) {
    const double g = lo + (hi - lo) * i / grid;
    const int cur = levels_below_baseline(g, delta, sign, n);
    if (cur != prev) {
      double a = prev_g, b = g;
      while (b - a > tol) {
        const double m = 0.5 * (a + b);
        if (levels_below_baseline(m, delta, sign, n) == prev) {
          a = m;
        } else {
          b = m;
        }
      }
      out.push_back(0.5 * (a + b));
    }
    prev = cur;
    prev_g = g;
  }
  return out;
}

// Juddean points: g where both sectors cross baseline n together.
inline std::vector<double> judd_by_crossings(double delta, int n, double lo, double hi, int grid = 300) {
  const std::vector<double> plus = baseline_crossings(delta, +1, n, lo, hi, grid);
  const std::vector<double> minus = baseline_crossings(delta, -1, n, lo, hi, grid);
  std::vector<double> out;
  for (double a : plus) {
    for (double b : minus) {
      if (std::abs(a - b) < 1e-6) out.push_back(0.5 * (a + b));
    }
  }
  return out;
}

}  // namespace ref

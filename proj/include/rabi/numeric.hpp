#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace rabi::numeric {

// Neumaier's variant of Kahan summation. Also tracks the running sum of
// magnitudes, which callers use as the cancellation scale.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
    abs_sum_ += std::abs(v);
  }

  double value() const noexcept { return sum_ + comp_; }
  double magnitude() const noexcept { return abs_sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  double abs_sum_ = 0.0;
};

inline int sign(double v) noexcept { return (v > 0.0) - (v < 0.0); }

// `points` evenly spaced values covering [lo, hi] inclusive.
inline std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> out;
  if (points <= 0) return out;
  out.reserve(static_cast<std::size_t>(points));
  if (points == 1) {
    out.push_back(lo);
    return out;
  }
  const double step = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) out.push_back(i == points - 1 ? hi : lo + step * i);
  return out;
}

struct Bracket {
  double lo;
  double hi;

  double mid() const noexcept { return 0.5 * (lo + hi); }
  double half_width() const noexcept { return 0.5 * (hi - lo); }
};

// Bisection on a bracket [lo, hi] whose endpoint values have opposite signs
// (f_lo is f(lo)). Stops once the bracket is narrower than `tol` or cannot
// shrink further in floating point.
template <class F>
Bracket bisect(F&& f, double lo, double hi, double f_lo, double tol) {
  int s_lo = sign(f_lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    const int sm = sign(fm);
    if (sm == 0) return Bracket{mid, mid};
    if (sm == s_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return Bracket{lo, hi};
}

// Vertex of the parabola through three points; falls back to the middle
// abscissa when the points are collinear.
inline double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curvature = (d12 - d01) / (x2 - x0);
  if (curvature == 0.0 || !std::isfinite(curvature)) return x1;
  const double v = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
  if (!(v > x0 && v < x2)) return x1;
  return v;
}

struct ScanRoot {
  double x;
  double half_width;
};

// A local minimum of |f| below the tangency threshold that refinement could
// not split into a sign change.
struct ScanDip {
  double x;
  double value;
};

struct ScanResult {
  std::vector<ScanRoot> roots;
  std::vector<ScanDip> unresolved;
};

struct ScanSettings {
  int points = 200;
  double tol = 1e-12;
  // A dip counts as a near-tangency when |f| < tangency_factor * median |f|.
  double tangency_factor = 1e-3;
  int refine_factor = 10;
};

inline double median_abs(std::vector<double> v) {
  if (v.empty()) return 0.0;
  for (double& e : v) e = std::abs(e);
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Uniform grid scan of a continuous f over [lo, hi]: every sign change is
// bisected to `tol`; every sub-threshold dip of |f| without a sign change is
// probed at its parabolic vertex and, failing that, rescanned once at
// `refine_factor` times the density. Roots come back ascending.
template <class F>
ScanResult scan_for_roots(F&& f, double lo, double hi, const ScanSettings& cfg) {
  ScanResult out;
  const std::vector<double> xs = linspace(lo, hi, cfg.points);
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = f(xs[i]);

  auto add_bracket = [&](double a, double b, double fa) {
    const Bracket br = bisect(f, a, b, fa, cfg.tol);
    out.roots.push_back(ScanRoot{br.mid(), br.half_width()});
  };

  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] == 0.0) {
      out.roots.push_back(ScanRoot{xs[i], 0.0});
      continue;
    }
    if (i + 1 < xs.size() && ys[i + 1] != 0.0 && sign(ys[i]) != sign(ys[i + 1])) {
      add_bracket(xs[i], xs[i + 1], ys[i]);
    }
  }

  const double threshold = cfg.tangency_factor * median_abs(ys);
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    const int s = sign(ys[i]);
    if (s == 0 || sign(ys[i - 1]) != s || sign(ys[i + 1]) != s) continue;
    const double a = std::abs(ys[i]);
    if (!(a < std::abs(ys[i - 1]) && a <= std::abs(ys[i + 1]) && a < threshold)) continue;

    const double v = parabola_vertex(xs[i - 1], ys[i - 1], xs[i], ys[i], xs[i + 1], ys[i + 1]);
    const double fv = v == xs[i] ? ys[i] : f(v);
    if (sign(fv) != s) {
      if (fv == 0.0) {
        out.roots.push_back(ScanRoot{v, 0.0});
      } else {
        add_bracket(xs[i - 1], v, ys[i - 1]);
        add_bracket(v, xs[i + 1], fv);
      }
      continue;
    }

    const std::vector<double> fine = linspace(xs[i - 1], xs[i + 1], 2 * cfg.refine_factor + 1);
    std::vector<double> fy(fine.size());
    for (std::size_t j = 0; j < fine.size(); ++j) fy[j] = j == 0 ? ys[i - 1] : j + 1 == fine.size() ? ys[i + 1] : f(fine[j]);
    bool resolved = false;
    for (std::size_t j = 0; j + 1 < fine.size(); ++j) {
      if (fy[j] == 0.0) {
        out.roots.push_back(ScanRoot{fine[j], 0.0});
        resolved = true;
      } else if (fy[j + 1] != 0.0 && sign(fy[j]) != sign(fy[j + 1])) {
        add_bracket(fine[j], fine[j + 1], fy[j]);
        resolved = true;
      }
    }
    if (!resolved) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < fine.size(); ++j) {
        if (std::abs(fy[j]) < std::abs(fy[best])) best = j;
      }
      out.unresolved.push_back(ScanDip{fine[best], fy[best]});
    }
  }

  std::sort(out.roots.begin(), out.roots.end(), [](const ScanRoot& a, const ScanRoot& b) { return a.x < b.x; });
  return out;
}

// 17 significant digits, the round-trip width of a double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace rabi::numeric

#pragma once

// Hamiltonian convention, parameter validation and the scaled spectral
// coordinate.
//
//   H = omega a^dag a + delta sigma_z + g sigma_x (a + a^dag)
//
// The qubit splitting is 2 delta. With Pi = sigma_z (-1)^{a^dag a} the two
// parity sectors reduce to
//
//   H_{+/-} = omega a^dag a + g (a + a^dag) +/- delta (-1)^{a^dag a}
//
// so at g == 0 the Plus sector holds k omega + delta (-1)^k and the Minus
// sector k omega - delta (-1)^k. Every other module inherits this choice
// from here.

#include <cmath>
#include <compare>
#include <string>
#include <string_view>

#include "rabi/errors.hpp"

namespace rabi {

enum class Parity { Plus, Minus };

constexpr Parity other(Parity p) noexcept { return p == Parity::Plus ? Parity::Minus : Parity::Plus; }

// +1 for Plus, -1 for Minus.
constexpr double sign_of(Parity p) noexcept { return p == Parity::Plus ? 1.0 : -1.0; }

constexpr std::string_view to_string(Parity p) noexcept { return p == Parity::Plus ? "plus" : "minus"; }

// Plus < Minus.
constexpr bool parity_less(Parity a, Parity b) noexcept {
  return a == Parity::Plus && b == Parity::Minus;
}

inline Parity parse_parity(std::string_view s) {
  if (s == "plus" || s == "+" || s == "Plus") return Parity::Plus;
  if (s == "minus" || s == "-" || s == "Minus") return Parity::Minus;
  throw Error("unknown parity '" + std::string(s) + "'");
}

struct ModelParams {
  double omega = 1.0;
  double g = 0.0;
  double delta = 0.0;
  // Set by validate() when the corresponding input was negative.
  bool g_flipped = false;
  bool delta_flipped = false;

  // Coupling and splitting in omega = 1 units.
  double g_scaled() const noexcept { return g / omega; }
  double delta_scaled() const noexcept { return delta / omega; }

  bool operator==(const ModelParams&) const = default;
};

// Dimensionless spectral coordinate x = E/omega + (g/omega)^2. Baselines of
// the displaced oscillator sit at integer x.
struct ScaledEnergy {
  double x = 0.0;

  auto operator<=>(const ScaledEnergy&) const = default;
};

// Rejects non-finite values or omega <= 0; maps g and delta onto their
// absolute values and records the flips. Idempotent.
inline ModelParams validate(ModelParams p) {
  if (!std::isfinite(p.omega) || p.omega <= 0.0) throw InvalidParameter("omega", p.omega);
  if (!std::isfinite(p.g)) throw InvalidParameter("g", p.g);
  if (!std::isfinite(p.delta)) throw InvalidParameter("delta", p.delta);
  if (std::signbit(p.g)) {
    p.g = -p.g;
    p.g_flipped = true;
  }
  if (std::signbit(p.delta)) {
    p.delta = -p.delta;
    p.delta_flipped = true;
  }
  return p;
}

inline ModelParams make_params(double omega, double g, double delta) {
  return validate(ModelParams{omega, g, delta});
}

// Parity of the normalized (delta >= 0) problem that carries the spectrum of
// `requested` in the caller's convention. A delta flip swaps the sectors.
constexpr Parity sector(const ModelParams& p, Parity requested) noexcept {
  return p.delta_flipped ? other(requested) : requested;
}

inline ScaledEnergy scaled_x(double energy, const ModelParams& p) {
  const double gs = p.g / p.omega;
  return ScaledEnergy{energy / p.omega + gs * gs};
}

inline double energy_from_x(ScaledEnergy x, const ModelParams& p) {
  return p.omega * x.x - p.g * p.g / p.omega;
}

// Energy of baseline n: n omega - g^2/omega.
inline double baseline_energy(int n, const ModelParams& p) {
  return energy_from_x(ScaledEnergy{static_cast<double>(n)}, p);
}

// The G-function has poles at x = 0, 1, 2, ... only; negative x is pole free.
inline int nearest_pole(double x) { return x <= 0.0 ? 0 : static_cast<int>(std::lround(x)); }

inline double pole_distance(double x) { return std::abs(x - nearest_pole(x)); }

}  // namespace rabi

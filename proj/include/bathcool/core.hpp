#pragma once

// Unit conventions and the Bose-Einstein occupation <-> temperature map.
//
// Temperatures are absolute and expressed in the same unit as theta0 = hbar*omega0/k.
// Times are measured in whatever unit makes gamma an inverse time; no physical
// constants appear anywhere in the library.

#include <cmath>
#include <string>

#include "bathcool/errors.hpp"

namespace bathcool {

template <typename Scalar = double>
struct PhysicalScales {
  Scalar theta0{1};  ///< hbar*omega0/k in temperature units
  Scalar gamma{1};   ///< leading decay constant, inverse time

  PhysicalScales() = default;
  PhysicalScales(Scalar theta0_, Scalar gamma_) : theta0(theta0_), gamma(gamma_) {
    if (!(theta0 > 0) || !std::isfinite(theta0)) throw DomainError("theta0 must be positive and finite");
    if (!(gamma > 0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive and finite");
  }
};

/// Mean thermal excitation number, >= 0.
template <typename Scalar = double>
struct Occupation {
  Scalar n_bar{0};

  Occupation() = default;
  explicit Occupation(Scalar n) : n_bar(n) {
    if (!(n >= 0) || !std::isfinite(n)) throw DomainError("occupation must be finite and >= 0");
  }
  operator Scalar() const { return n_bar; }
};

/// Absolute temperature in units of theta0. Only positive values can be mapped to occupations.
template <typename Scalar = double>
struct Temperature {
  Scalar value{0};

  Temperature() = default;
  explicit Temperature(Scalar v) : value(v) {
    if (!std::isfinite(v)) throw DomainError("temperature must be finite");
  }
  operator Scalar() const { return value; }
};

namespace detail {
template <typename Scalar>
void require_mappable(const Temperature<Scalar>& T) {
  if (!(T.value > 0)) throw DomainError("temperature must be > 0 to map to an occupation");
}
}  // namespace detail

/// n(T) = 1 / (exp(theta0/T) - 1).
template <typename Scalar>
Occupation<Scalar> occupation_from_temperature(const Temperature<Scalar>& T,
                                               const PhysicalScales<Scalar>& scales) {
  detail::require_mappable(T);
  using std::expm1;
  return Occupation<Scalar>(Scalar(1) / expm1(scales.theta0 / T.value));
}

/// Exact inverse of occupation_from_temperature: T = theta0 / ln(1 + 1/n).
template <typename Scalar>
Temperature<Scalar> temperature_from_occupation(const Occupation<Scalar>& n,
                                                const PhysicalScales<Scalar>& scales) {
  if (!(n.n_bar > 0)) throw DomainError("zero occupation corresponds to T = 0");
  using std::log1p;
  return Temperature<Scalar>(scales.theta0 / log1p(Scalar(1) / n.n_bar));
}

/// High-temperature limit n ~ kT / hbar*omega0.
template <typename Scalar>
Occupation<Scalar> high_temp_occupation(const Temperature<Scalar>& T,
                                        const PhysicalScales<Scalar>& scales) {
  detail::require_mappable(T);
  return Occupation<Scalar>(T.value / scales.theta0);
}

/// Inverse of the high-temperature limit.
template <typename Scalar>
Temperature<Scalar> high_temp_temperature(const Occupation<Scalar>& n,
                                          const PhysicalScales<Scalar>& scales) {
  return Temperature<Scalar>(n.n_bar * scales.theta0);
}

/// Which occupation <-> temperature map a caller asked for.
enum class TemperatureMap { Exact, Linear };

template <typename Scalar>
Occupation<Scalar> map_to_occupation(TemperatureMap map, const Temperature<Scalar>& T,
                                     const PhysicalScales<Scalar>& scales) {
  return map == TemperatureMap::Exact ? occupation_from_temperature(T, scales)
                                      : high_temp_occupation(T, scales);
}

template <typename Scalar>
Temperature<Scalar> map_to_temperature(TemperatureMap map, const Occupation<Scalar>& n,
                                       const PhysicalScales<Scalar>& scales) {
  return map == TemperatureMap::Exact ? temperature_from_occupation(n, scales)
                                      : high_temp_temperature(n, scales);
}

inline const char* to_string(TemperatureMap map) {
  return map == TemperatureMap::Exact ? "exact" : "linear";
}

}  // namespace bathcool

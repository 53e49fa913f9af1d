#pragma once

// Divided differences of exp over complex nodes, exp[z0, ..., zm], with repeated
// and nearly coincident nodes allowed.
//
// By the Hermite-Genocchi formula, the integral of exp(a1 s1 + ... + am sm) over the
// simplex {s_k >= 0, sum s_k <= t} equals t^m exp[0, a1 t, ..., am t]. That is how
// the nested time integrals of the reservoir correlator are evaluated.

#include <array>
#include <complex>
#include <cstddef>

namespace bathcool {

namespace detail {

// Taylor form for a tight cluster of nodes: exp[z] = sum_k h_k(z) / (k + m)!, with
// h_k the complete homogeneous symmetric polynomials.
template <typename Scalar, std::size_t N>
std::complex<Scalar> exp_dd_taylor(const std::array<std::complex<Scalar>, N>& z) {
  constexpr int terms = 28;
  std::array<std::complex<Scalar>, terms> h{};
  h[0] = 1;
  for (int k = 1; k < terms; ++k) h[k] = h[k - 1] * z[0];
  for (std::size_t j = 1; j < N; ++j)
    for (int k = 1; k < terms; ++k) h[k] += z[j] * h[k - 1];

  Scalar inv_factorial = 1;
  for (std::size_t k = 2; k < N; ++k) inv_factorial /= static_cast<Scalar>(k);
  std::complex<Scalar> sum = 0;
  for (int k = 0; k < terms; ++k) {
    sum += h[k] * inv_factorial;
    inv_factorial /= static_cast<Scalar>(k + N);
  }
  return sum;
}

template <typename Scalar, std::size_t N>
std::array<std::complex<Scalar>, N - 1> drop(const std::array<std::complex<Scalar>, N>& z, std::size_t skip) {
  std::array<std::complex<Scalar>, N - 1> out{};
  for (std::size_t i = 0, j = 0; i < N; ++i)
    if (i != skip) out[j++] = z[i];
  return out;
}

}  // namespace detail

/// exp[z0, ..., z_{N-1}]. Splits on the widest node pair until the remaining cluster is
/// narrower than one unit, then sums the shifted Taylor series.
template <typename Scalar, std::size_t N>
std::complex<Scalar> exp_divided_difference(const std::array<std::complex<Scalar>, N>& z) {
  static_assert(N >= 1);
  if constexpr (N == 1) {
    return std::exp(z[0]);
  } else {
    Scalar widest = -1;
    std::size_t a = 0, b = 1;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j) {
        const Scalar d = std::abs(z[i] - z[j]);
        if (d > widest) {
          widest = d;
          a = i;
          b = j;
        }
      }
    if (widest < 1) {
      std::complex<Scalar> centre = 0;
      for (const auto& zi : z) centre += zi;
      centre /= static_cast<Scalar>(N);
      std::array<std::complex<Scalar>, N> shifted = z;
      for (auto& zi : shifted) zi -= centre;
      return std::exp(centre) * detail::exp_dd_taylor(shifted);
    }
    return (exp_divided_difference(detail::drop(z, b)) - exp_divided_difference(detail::drop(z, a))) /
           (z[a] - z[b]);
  }
}

}  // namespace bathcool

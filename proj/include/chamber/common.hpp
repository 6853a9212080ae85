#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace chamber {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kImag{0.0, 1.0};

// Dense state-dimension cap; keeps every eigendecomposition and M-particle
// check at desk scale.
inline constexpr long kDimCap = 4096;

// n_sites^particle_count with the capacity cap enforced.
inline int tensor_dim(int n_sites, int particle_count) {
  long dim = 1;
  for (int k = 0; k < particle_count; ++k) {
    dim *= n_sites;
    if (dim > kDimCap)
      throw std::length_error(
          "capacity: state dimension n_sites^M = " + std::to_string(n_sites) +
          "^" + std::to_string(particle_count) + " exceeds " +
          std::to_string(kDimCap));
  }
  return static_cast<int>(dim);
}

}  // namespace chamber

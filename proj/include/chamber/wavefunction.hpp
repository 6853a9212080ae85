#pragma once

#include <Eigen/Dense>
#include <vector>

#include "chamber/common.hpp"
#include "chamber/lattice.hpp"

namespace chamber {

/// Complex amplitude array over the particle lattice (single- or M-particle
/// tensor grid). Norms carry the lattice measure: ||psi||^2 = sum |psi|^2 a^M.
struct WaveFunction {
  GridPtr grid;
  int particle_count = 1;
  Eigen::VectorXcd amplitudes;

  double measure() const;  // spacing^particle_count
  double norm2() const;
  double norm() const;
  WaveFunction normalized() const;

  // <x> and <x^2> - <x>^2 of the first particle's position, for a normalized
  // state; M > 1 marginalizes the remaining particles.
  double mean_position() const;
  double position_variance() const;
};

WaveFunction make_state(GridPtr grid, Eigen::VectorXcd amplitudes,
                        int particle_count = 1);

// Unit-norm point mass at one site: amplitude 1/sqrt(a).
WaveFunction point_mass(const GridPtr& grid, int site);

// Equal-weight superposition of the given sites, normalized.
WaveFunction site_superposition(const GridPtr& grid,
                                const std::vector<int>& sites);

// Normalized discrete Gaussian bump centered at `center` with width `width`.
WaveFunction gaussian_bump(const GridPtr& grid, double center, double width);

// M-fold tensor power of a single-particle state.
WaveFunction tensor_power(const WaveFunction& psi, int particle_count);

}  // namespace chamber

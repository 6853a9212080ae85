#include "chamber/wavefunction.hpp"

#include <cmath>
#include <stdexcept>

namespace chamber {

double WaveFunction::measure() const {
  return std::pow(grid->spacing, particle_count);
}

double WaveFunction::norm2() const { return amplitudes.squaredNorm() * measure(); }

double WaveFunction::norm() const { return std::sqrt(norm2()); }

WaveFunction WaveFunction::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero state");
  WaveFunction out = *this;
  out.amplitudes /= n;
  return out;
}

double WaveFunction::mean_position() const {
  const int n = grid->n_sites;
  const long block = amplitudes.size() / n;  // n^(M-1)
  double mean = 0.0;
  for (int j = 0; j < n; ++j) {
    const double w =
        amplitudes.segment(j * block, block).squaredNorm() * measure();
    mean += grid->positions[j] * w;
  }
  return mean;
}

double WaveFunction::position_variance() const {
  const int n = grid->n_sites;
  const long block = amplitudes.size() / n;
  double m1 = 0.0, m2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double w =
        amplitudes.segment(j * block, block).squaredNorm() * measure();
    m1 += grid->positions[j] * w;
    m2 += grid->positions[j] * grid->positions[j] * w;
  }
  return m2 - m1 * m1;
}

WaveFunction make_state(GridPtr grid, Eigen::VectorXcd amplitudes,
                        int particle_count) {
  if (!grid) throw std::invalid_argument("null grid");
  const int dim = tensor_dim(grid->n_sites, particle_count);
  if (amplitudes.size() != dim)
    throw std::invalid_argument(
        "amplitude length " + std::to_string(amplitudes.size()) +
        " does not match n_sites^M = " + std::to_string(dim));
  WaveFunction psi;
  psi.grid = std::move(grid);
  psi.particle_count = particle_count;
  psi.amplitudes = std::move(amplitudes);
  return psi;
}

WaveFunction point_mass(const GridPtr& grid, int site) {
  if (site < 0 || site >= grid->n_sites)
    throw std::invalid_argument("site index out of range");
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(grid->n_sites);
  amps[site] = 1.0 / std::sqrt(grid->spacing);
  return make_state(grid, std::move(amps));
}

WaveFunction site_superposition(const GridPtr& grid,
                                const std::vector<int>& sites) {
  if (sites.empty()) throw std::invalid_argument("empty site list");
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(grid->n_sites);
  for (int s : sites) {
    if (s < 0 || s >= grid->n_sites)
      throw std::invalid_argument("site index out of range");
    amps[s] += 1.0;
  }
  return make_state(grid, std::move(amps)).normalized();
}

WaveFunction gaussian_bump(const GridPtr& grid, double center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("width > 0 violated");
  Eigen::VectorXcd amps(grid->n_sites);
  for (int j = 0; j < grid->n_sites; ++j) {
    const double u = (grid->positions[j] - center) / width;
    amps[j] = std::exp(-0.5 * u * u);
  }
  return make_state(grid, std::move(amps)).normalized();
}

WaveFunction tensor_power(const WaveFunction& psi, int particle_count) {
  if (psi.particle_count != 1)
    throw std::invalid_argument("tensor_power expects a single-particle state");
  const int n = psi.grid->n_sites;
  tensor_dim(n, particle_count);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Ones(1);
  for (int k = 0; k < particle_count; ++k) {
    Eigen::VectorXcd next(amps.size() * n);
    for (long i = 0; i < amps.size(); ++i)
      next.segment(i * n, n) = amps[i] * psi.amplitudes;
    amps.swap(next);
  }
  return make_state(psi.grid, std::move(amps), particle_count);
}

}  // namespace chamber

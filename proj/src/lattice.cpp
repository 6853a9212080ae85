#include "chamber/lattice.hpp"

#include <stdexcept>

namespace chamber {

std::string to_string(Boundary b) {
  return b == Boundary::dirichlet ? "dirichlet" : "periodic";
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "dirichlet") return Boundary::dirichlet;
  if (s == "periodic") return Boundary::periodic;
  throw std::invalid_argument("boundary must be 'dirichlet' or 'periodic', got '" + s + "'");
}

GridPtr build_grid(int n_sites, double spacing, Boundary boundary) {
  if (n_sites < 2)
    throw std::invalid_argument("n_sites >= 2 violated (n_sites = " +
                                std::to_string(n_sites) + ")");
  if (!(spacing > 0.0))
    throw std::invalid_argument("spacing > 0 violated (spacing = " +
                                std::to_string(spacing) + ")");
  auto grid = std::make_shared<LatticeGrid>();
  grid->n_sites = n_sites;
  grid->spacing = spacing;
  grid->boundary = boundary;
  grid->positions.resize(n_sites);
  for (int j = 0; j < n_sites; ++j)
    grid->positions[j] = (j - n_sites / 2) * spacing;
  return grid;
}

}  // namespace chamber

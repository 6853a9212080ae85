#pragma once

#include <memory>
#include <string>
#include <vector>

namespace chamber {

enum class Boundary { dirichlet, periodic };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

/// Uniform 1-d particle lattice with centered sites x_j = (j - n/2) * spacing.
struct LatticeGrid {
  int n_sites;
  double spacing;
  Boundary boundary;
  std::vector<double> positions;
};

using GridPtr = std::shared_ptr<const LatticeGrid>;

GridPtr build_grid(int n_sites, double spacing,
                   Boundary boundary = Boundary::dirichlet);

}  // namespace chamber

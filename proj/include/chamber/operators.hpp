#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "chamber/common.hpp"
#include "chamber/lattice.hpp"
#include "chamber/wavefunction.hpp"

namespace chamber {

/// Dense complex operator with a Hermitian hint that is validated on
/// construction (max |A - A^dagger| <= 1e-12 when the flag is set).
struct DenseOperator {
  Eigen::MatrixXcd entries;
  bool hermitian_flag = false;

  int dim() const { return static_cast<int>(entries.rows()); }
  double hermiticity_defect() const;
};

DenseOperator make_operator(Eigen::MatrixXcd entries, bool hermitian_hint);

/// Diagonal position operator in the site representation.
DenseOperator position_operator(const LatticeGrid& grid);

using PairPotential = std::function<double(double, double)>;

/// M-particle Hamiltonian: sum of single-particle kinetic + potential terms
/// plus an optional diagonal pair interaction W(x_k, x_l). The kinetic term is
/// the central finite-difference Laplacian with the grid's boundary rule.
DenseOperator hamiltonian(const LatticeGrid& grid, double mass,
                          const std::vector<double>& potential,
                          const PairPotential& pair_potential = nullptr,
                          int particle_count = 1, double hbar = 1.0);

/// I^(k-1) (x) op (x) I^(M-k), acting on the kth particle, 1 <= k <= M.
DenseOperator embed_single(const DenseOperator& op, int k, int particle_count);

/// Exact propagator exp(-i H dt / hbar) backed by a one-time eigendecomposition
/// of H. Immutable after construction; safe to share across threads.
class UnitaryPropagator {
 public:
  explicit UnitaryPropagator(const DenseOperator& h, double hbar = 1.0);

  Eigen::VectorXcd apply(const Eigen::VectorXcd& psi, double dt) const;
  WaveFunction evolve(const WaveFunction& psi, double dt) const;
  Eigen::MatrixXcd matrix(double dt) const;

  int dim() const { return static_cast<int>(eigenvalues_.size()); }
  double hbar() const { return hbar_; }
  const Eigen::MatrixXcd& hamiltonian_matrix() const { return h_; }

 private:
  Eigen::MatrixXcd h_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXcd eigenvectors_;
  double hbar_;
};

WaveFunction evolve_unitary(const DenseOperator& h, const WaveFunction& psi,
                            double dt, double hbar = 1.0);

}  // namespace chamber

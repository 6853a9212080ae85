#pragma once

#include <Eigen/Dense>
#include <memory>

#include "chamber/operators.hpp"
#include "chamber/packet.hpp"
#include "chamber/wavefunction.hpp"

namespace chamber {

/// Family y -> G(y) = f0(yI - kappa R) / f0(y) of diagonal reduction
/// operators for a position-coupled scattering. The gaussian kinds use the
/// closed-form exponent pi*kappa*x*(y - kappa*x/2); custom packets evaluate
/// the quotient by interpolation. All tables are built once at construction.
class ReductionKernel {
 public:
  ReductionKernel(PacketPtr packet, const DenseOperator& r, double kappa);

  const PointerPacket& packet() const { return *packet_; }
  PacketPtr packet_ptr() const { return packet_; }
  double kappa() const { return kappa_; }
  int n_sites() const { return static_cast<int>(sites_.size()); }
  const Eigen::VectorXd& sites() const { return sites_; }

  /// Diagonal factors of G at meter grid point index i (length n_sites).
  Eigen::VectorXcd factors(int y_index) const { return factors_.col(y_index); }
  cplx factor(int site, int y_index) const { return factors_(site, y_index); }

  /// Diagonal factors of G at an arbitrary reading y.
  Eigen::VectorXcd factors_at(double y) const;

  /// |G_j(y_i)|^2 |f0(y_i)|^2; row j integrates to 1 over the meter grid up
  /// to the POVM residual.
  const Eigen::MatrixXd& shifted_density() const { return shifted_density_; }

  /// Gram matrix K(a,b) = sum_y G_a(y) conj(G_b(y)) |f0(y)|^2 h.
  const Eigen::MatrixXcd& gram() const { return gram_; }

 private:
  PacketPtr packet_;
  double kappa_;
  Eigen::VectorXd sites_;
  Eigen::MatrixXcd factors_;         // n_sites x n_y
  Eigen::MatrixXd shifted_density_;  // n_sites x n_y
  Eigen::MatrixXcd gram_;            // n_sites x n_sites
};

ReductionKernel reduction_kernel(PacketPtr packet, const DenseOperator& r,
                                 double kappa);

/// Max-norm deviation of sum_y G(y)^dag G(y) |f0(y)|^2 h from the identity.
double povm_residual(const ReductionKernel& kernel);

/// Pointer density p(y) = ||G(y) psi||^2 |f0(y)|^2 for a normalized psi.
Eigen::VectorXd output_density(const ReductionKernel& kernel,
                               const WaveFunction& psi);

}  // namespace chamber

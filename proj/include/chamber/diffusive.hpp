#pragma once

#include <Eigen/Dense>
#include <vector>

#include "chamber/operators.hpp"
#include "chamber/oracle.hpp"
#include "chamber/packet.hpp"
#include "chamber/rng.hpp"

namespace chamber {

enum class NoiseKind { real_u, complex_v };

/// Precomputed data for the diffusive-limit integrators. K is
/// (i/hbar) H + (1/2)(gamma/hbar)^2 sigma2 sum_k R(k)^2; its Hermitian part
/// equals the second term to 1e-12 by construction, which is what cancels the
/// Ito correction in the norm-preserving equation.
struct DiffusionParams {
  double gamma = 0.0;
  double sigma2 = 0.0;
  double p0 = 0.0;
  double hbar = 1.0;
  double dt = 1e-3;
  NoiseKind kind = NoiseKind::complex_v;
  int particle_count = 1;

  Eigen::MatrixXcd h_op;       // M-particle Hamiltonian
  Eigen::MatrixXcd k_op;       // K as above
  Eigen::VectorXd site_mean;   // (1/M) sum_k x_{a_k}
  Eigen::VectorXd site_sq;     // sum_k x_{a_k}^2
  Eigen::MatrixXd quad;        // sum_k x_{a_k} x_{b_k}
  cplx noise_sym{0.0, 0.0};    // f0^T L' L' f0
  double noise_abs = 0.0;      // f0^T L'^dag L' f0

  double hermitian_part_defect() const;
};

DiffusionParams make_diffusion_params(const DenseOperator& h,
                                      const DenseOperator& r, double gamma,
                                      const PointerPacket& packet,
                                      NoiseKind kind, double dt,
                                      int particle_count = 1);

struct NoisePath {
  std::uint64_t seed = 0;
  double dt = 0.0;
  NoiseKind kind = NoiseKind::real_u;
  Eigen::VectorXd du;   // real_u increments
  Eigen::VectorXcd dv;  // complex_v increments
};

/// I.i.d. Gaussian increments with the packet's second-moment tables:
/// du has variance sigma2 dt; dv has E[dv dv] = (f0^T L'L' f0) dt and
/// E[|dv|^2] = (f0^T L'^dag L' f0) dt, both scaled by `covariance_scale`.
NoisePath wiener_increments(const PointerPacket& packet, NoiseKind kind,
                            double dt, int steps, RngStream& rng,
                            double covariance_scale = 1.0);

/// H - gamma p0 R, the effective potential of the large-number limit.
DenseOperator mean_field_hamiltonian(const DenseOperator& h,
                                     const DenseOperator& r, double gamma,
                                     double p0);

/// Euler-Maruyama update of the linear diffusive wave equation
/// d chi + K chi dt = gamma R chi dv. Not pathwise normalized.
Eigen::VectorXcd diffusive_sse_step(const Eigen::VectorXcd& chi,
                                    const DiffusionParams& params, cplx dv);

struct UnitaryStepResult {
  Eigen::VectorXcd psi;
  double defect;  // |pre-projection norm ratio - 1|
};

/// Stochastic Heun step of the norm-preserving equation
/// d psi + K psi dt = (i/hbar) gamma R psi du, integrated in its
/// Stratonovich form (drift -(i/hbar) H), followed by exact renormalization.
UnitaryStepResult unitary_diffusive_step(const Eigen::VectorXcd& psi,
                                         const DiffusionParams& params,
                                         double du);

/// Euler-Maruyama update of the M-particle diffusive density equation,
/// driven by dw with the multiplication table of sqrt(M) v. Hermiticity is
/// enforced by symmetrization; the pre-symmetrization deviation is reported.
Eigen::MatrixXcd diffusive_density_step(const Eigen::MatrixXcd& rho,
                                        const DiffusionParams& params, cplx dw,
                                        double* hermiticity_deviation = nullptr);

/// Compares the exact jump master generator at kappa = -gamma/sqrt(nu)
/// against the diffusive master generator on a basis of matrix units,
/// over a ladder of rates.
struct ConvergenceReport {
  std::vector<double> nus;
  std::vector<double> errors;
  double fitted_exponent = 0.0;  // err ~ nu^(-exponent)
};

ConvergenceReport jump_generator_vs_diffusive(const std::vector<double>& nus,
                                              double gamma,
                                              const DenseOperator& h,
                                              const DenseOperator& r,
                                              PacketPtr packet,
                                              double hbar = 1.0);

}  // namespace chamber

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "chamber/kernel.hpp"
#include "chamber/mixing.hpp"

namespace chamber {

/// drho/dt = -(i/hbar)[H, rho] + M nu (sum_y Psi[rho](y) |f0|^2 h - rho),
/// the average of the jump dynamics over the event law.
Eigen::MatrixXcd jump_master_rhs(const Eigen::MatrixXcd& rho,
                                 const DenseOperator& h,
                                 const ReductionKernel& kernel, double nu,
                                 int particle_count, double hbar = 1.0);

/// Average of the diffusive density dynamics over the noise:
/// drho/dt = -(i/hbar)[H, rho]
///           - (gamma/hbar)^2 sigma2 sum_k (R(k)^2 rho + rho R(k)^2
///                                          - 2 R(k) rho R(k)) / 2.
/// R is the single-particle position diagonal; H is the M-particle operator.
Eigen::MatrixXcd diffusive_master_rhs(const Eigen::MatrixXcd& rho,
                                      const DenseOperator& h,
                                      const DenseOperator& r, double gamma,
                                      double sigma2, int particle_count,
                                      double hbar = 1.0);

using MasterRhs =
    std::function<Eigen::MatrixXcd(double, const Eigen::MatrixXcd&)>;

/// Classical fixed-step fourth-order Runge-Kutta integration to time T.
/// `error_estimate`, when given, receives the max-entry deviation against a
/// half-step integration; if that exceeds `flag_tolerance` the step size is
/// rejected.
Eigen::MatrixXcd ode_integrate(
    const MasterRhs& rhs, Eigen::MatrixXcd rho0, double horizon, double dt,
    double* error_estimate = nullptr,
    double flag_tolerance = std::numeric_limits<double>::infinity());

struct EnsembleMoment {
  Eigen::MatrixXcd mean;
  Eigen::MatrixXd sem;  // per-entry standard error
  long count = 0;
};

/// Plain index-ordered average of state matrices with per-entry SEM.
EnsembleMoment ensemble_average(const std::vector<Eigen::MatrixXcd>& samples);

/// (1/2) ||rho1 - rho2||_1 for unit-trace inputs.
double trace_distance(const Eigen::MatrixXcd& rho1,
                      const Eigen::MatrixXcd& rho2);

struct OracleReport {
  std::vector<double> times;
  std::vector<double> distance;
  std::vector<double> sem;
  double tolerance = 0.0;
  bool all_pass() const;
};

}  // namespace chamber

#pragma once

#include <vector>

#include "chamber/kernel.hpp"
#include "chamber/operators.hpp"

namespace chamber {

/// Result of one position kick read out at pointer value y.
struct KickOutcome {
  double y;
  WaveFunction posterior;  // normalized
  double likelihood;       // output density at y
  double prior_norm;       // ||G(y) eta||^2
};

KickOutcome posterior_state(const ReductionKernel& kernel,
                            const WaveFunction& eta, double y);

/// Pointer readout density; delegates to output_density.
Eigen::VectorXd pointer_statistics(const ReductionKernel& kernel,
                                   const WaveFunction& eta);

/// Sharp discrete readout: cell width kappa (an integer multiple of the grid
/// spacing) bins the position spectrum; probabilities are the binned spectral
/// weights.
struct SharpStats {
  std::vector<double> cell_positions;  // kappa * floor(x / kappa), sorted
  std::vector<double> probabilities;
};

SharpStats sharp_projection_stats(const LatticeGrid& grid, double kappa,
                                  const WaveFunction& eta);

/// Free evolution on [t0, 0), kick G(y) at time 0, free evolution on [0, t].
/// For t <= 0 the output is purely unitary evolution.
WaveFunction single_kick_evolve(const UnitaryPropagator& prop,
                                const ReductionKernel& kernel,
                                const WaveFunction& eta, double t0, double t,
                                double y);

/// Explicit joint-space model on H (x) L^2(meter): verifies that the shift
/// unitary exp(-i kappa R (x) P / hbar), built through the meter momentum
/// eigenbasis, moves the meter by kappa*x, that its reduced statistics match
/// the kernel's output density, and that readouts commute with later system
/// observables.
struct JointModelReport {
  int joint_dim;
  double shift_deviation;
  double marginal_deviation;
  double commutator_norm;
};

JointModelReport joint_model_check(const GridPtr& grid, const DenseOperator& h,
                                   double kappa, int meter_points = 64,
                                   double meter_halfwidth = 8.0,
                                   double hbar = 1.0,
                                   bool with_commutator = true);

}  // namespace chamber

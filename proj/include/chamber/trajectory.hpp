#pragma once

#include <cstdint>
#include <vector>

#include "chamber/config.hpp"
#include "chamber/kernel.hpp"
#include "chamber/operators.hpp"
#include "chamber/rng.hpp"

namespace chamber {

struct TrajectoryEvent {
  double t;
  double y;
};

struct StateSnapshot {
  double t;
  WaveFunction state;
  double weight;  // ||chi||^2 in linear mode, 1 in normalized mode
};

/// Seeded, time-ordered event record with optional state snapshots.
struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  EvolutionMode mode = EvolutionMode::normalized;
  std::vector<TrajectoryEvent> events;
  std::vector<StateSnapshot> snapshots;
  std::vector<double> weight_path;  // linear mode only
};

/// Strictly increasing arrival times on [0, horizon) with exponential gaps.
std::vector<double> sample_poisson_times(double nu, double horizon,
                                         RngStream& rng);

/// Inverse-CDF draw of a grid index from a density table with cell width h.
int sample_index_from_density(const Eigen::VectorXd& density, double h,
                              RngStream& rng);

/// Meter reading drawn from the output law of a normalized state.
double sample_outcome(const ReductionKernel& kernel, const WaveFunction& chi,
                      RngStream& rng);

/// One jump trajectory. Linear mode samples events under the input measure
/// (Poisson times, packet-law outcomes) and leaves the state unnormalized;
/// normalized mode draws outcomes from the pre-kick state's output law and
/// renormalizes after each kick. Between events the propagation is the exact
/// cached matrix exponential. Snapshots never advance the working state, so a
/// replay of the recorded events reproduces them bitwise.
TrajectoryRecord run_trajectory(const SimConfig& config,
                                const UnitaryPropagator& prop,
                                const ReductionKernel& kernel,
                                const WaveFunction& eta,
                                std::uint64_t traj_index = 0);

/// Deterministic replay of a time-ordered event list up to time t.
WaveFunction chronological_reduction(const std::vector<TrajectoryEvent>& events,
                                     const UnitaryPropagator& prop,
                                     const ReductionKernel& kernel,
                                     const WaveFunction& eta, double t,
                                     bool renormalize = false);

/// Index-ordered ensemble statistics at the configured sample times. The
/// reduction order is fixed by trajectory index, so results do not depend on
/// the thread count.
struct EnsembleStats {
  std::vector<double> times;
  std::vector<Eigen::MatrixXcd> mean_state;  // mean of a^M chi chi^dag
  std::vector<Eigen::MatrixXd> sem_state;    // per-entry SEM
  std::vector<double> mean_norm2, sem_norm2;
  std::vector<double> mean_x, sem_x;
  long count = 0;
};

EnsembleStats run_jump_ensemble(const SimConfig& config,
                                const UnitaryPropagator& prop,
                                const ReductionKernel& kernel,
                                const WaveFunction& eta);

/// Initial state named by SimConfig::init.
WaveFunction initial_state(const SimConfig& config, const GridPtr& grid);

}  // namespace chamber

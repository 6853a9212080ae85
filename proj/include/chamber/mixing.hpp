#pragma once

#include <vector>

#include "chamber/config.hpp"
#include "chamber/kernel.hpp"
#include "chamber/operators.hpp"
#include "chamber/trajectory.hpp"

namespace chamber {

/// M-particle density operator, measure-weighted so that the plain matrix
/// trace is the state weight (1 in normalized mode, the likelihood in linear
/// mode).
struct DensityMatrix {
  GridPtr grid;
  int particle_count = 1;
  Eigen::MatrixXcd entries;

  int dim() const { return static_cast<int>(entries.rows()); }
  double trace_weight() const { return entries.trace().real(); }
  double hermiticity_defect() const {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  }
  DensityMatrix normalized() const;
};

DensityMatrix pure_density(const WaveFunction& psi);

/// Event carrying the (unobservable) particle label; used only by the
/// label-enumeration harness.
struct LabeledEvent {
  double t;
  double y;
  int label;  // 1..M
};

struct LabeledTrajectoryRecord {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::vector<LabeledEvent> events;
};

/// rho -> (1/M) sum_k G(k,y) rho G(k,y)^dag.
DensityMatrix mixing_kick(const DensityMatrix& rho,
                          const ReductionKernel& kernel, double y);

/// Nonselective channel: sum_y (1/M) sum_k G(k,y) rho G(k,y)^dag |f0|^2 h,
/// evaluated through the kernel's Gram matrix.
DensityMatrix nonselective_mixing_step(const DensityMatrix& rho,
                                       const ReductionKernel& kernel);

/// Tr{E(y) rho} with E(y) = (1/M) sum_k G^dag(k,y) G(k,y).
double kick_trace(const DensityMatrix& rho, const ReductionKernel& kernel,
                  double y);

struct DensitySnapshot {
  double t;
  DensityMatrix state;
};

struct DensityTrajectory {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  EvolutionMode mode = EvolutionMode::normalized;
  std::vector<TrajectoryEvent> events;
  std::vector<DensitySnapshot> snapshots;
};

/// M-particle density trajectory with event intensity M*nu. Linear mode keeps
/// the trace as the likelihood weight; normalized mode draws outcomes from
/// Tr{E(y) rho} |f0(y)|^2 h and renormalizes after each kick.
DensityTrajectory run_density_trajectory(const SimConfig& config,
                                         const UnitaryPropagator& prop,
                                         const ReductionKernel& kernel,
                                         const DensityMatrix& rho0,
                                         std::uint64_t traj_index = 0);

/// Pure labeled evolution: U to t1, G(k1,y1), ..., U to t.
WaveFunction labeled_pure_state(const std::vector<LabeledEvent>& events,
                                const UnitaryPropagator& prop,
                                const ReductionKernel& kernel,
                                const WaveFunction& eta, double t);

/// Max deviation between the label-enumerated average of pure conjugations
/// and the iterated mixing kicks, for fixed events (t, y). Enumerates all M^n
/// label assignments; M^n <= 64.
double conditional_expectation_check(const std::vector<TrajectoryEvent>& events,
                                     const UnitaryPropagator& prop,
                                     const ReductionKernel& kernel,
                                     const WaveFunction& eta, double t);

/// -Tr(rho ln rho) for a trace-one density matrix; eigenvalues are clamped at
/// zero within 1e-10 before the logarithm.
double von_neumann_entropy(const DensityMatrix& rho);

/// Projection onto the bosonic (symmetric) subspace, renormalized.
WaveFunction symmetrize(const WaveFunction& psi, int particle_count);

/// Conjugation by the permutation that swaps tensor factors a and b.
Eigen::MatrixXcd swap_conjugate(const Eigen::MatrixXcd& m, int n_sites,
                                int particle_count, int a, int b);

}  // namespace chamber

#include "chamber/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace chamber {

namespace {

// digit of tensor index a for particle k (1-based), particle 1 most significant
inline int digit(long a, int k, int n, int m) {
  long div = 1;
  for (int j = 0; j < m - k; ++j) div *= n;
  return static_cast<int>((a / div) % n);
}

}  // namespace

DensityMatrix DensityMatrix::normalized() const {
  const double tr = trace_weight();
  if (!(tr > 0.0)) throw std::invalid_argument("cannot normalize a traceless state");
  DensityMatrix out = *this;
  out.entries /= tr;
  return out;
}

DensityMatrix pure_density(const WaveFunction& psi) {
  DensityMatrix rho;
  rho.grid = psi.grid;
  rho.particle_count = psi.particle_count;
  rho.entries = psi.measure() * psi.amplitudes * psi.amplitudes.adjoint();
  return rho;
}

DensityMatrix mixing_kick(const DensityMatrix& rho,
                          const ReductionKernel& kernel, double y) {
  const int n = kernel.n_sites();
  if (rho.grid->n_sites != n)
    throw std::invalid_argument("density dimension does not match kernel");
  const Eigen::VectorXcd g = kernel.factors_at(y);
  const int m = rho.particle_count;
  const long dim = rho.dim();

  DensityMatrix out = rho;
  out.entries.setZero();
  for (int k = 1; k <= m; ++k) {
    Eigen::VectorXcd fk(dim);
    for (long a = 0; a < dim; ++a) fk[a] = g[digit(a, k, n, m)];
    for (long a = 0; a < dim; ++a)
      for (long b = 0; b < dim; ++b)
        out.entries(a, b) += fk[a] * std::conj(fk[b]) * rho.entries(a, b);
  }
  out.entries /= static_cast<double>(m);
  return out;
}

DensityMatrix nonselective_mixing_step(const DensityMatrix& rho,
                                       const ReductionKernel& kernel) {
  const int n = kernel.n_sites();
  const int m = rho.particle_count;
  const long dim = rho.dim();
  const Eigen::MatrixXcd& gram = kernel.gram();

  DensityMatrix out = rho;
  for (long a = 0; a < dim; ++a)
    for (long b = 0; b < dim; ++b) {
      cplx factor{0.0, 0.0};
      for (int k = 1; k <= m; ++k)
        factor += gram(digit(a, k, n, m), digit(b, k, n, m));
      out.entries(a, b) = rho.entries(a, b) * factor / static_cast<double>(m);
    }
  return out;
}

double kick_trace(const DensityMatrix& rho, const ReductionKernel& kernel,
                  double y) {
  const int n = kernel.n_sites();
  const int m = rho.particle_count;
  const long dim = rho.dim();
  const Eigen::VectorXcd g = kernel.factors_at(y);
  double acc = 0.0;
  for (int k = 1; k <= m; ++k)
    for (long a = 0; a < dim; ++a)
      acc += std::norm(g[digit(a, k, n, m)]) * rho.entries(a, a).real();
  return acc / static_cast<double>(m);
}

DensityTrajectory run_density_trajectory(const SimConfig& config,
                                         const UnitaryPropagator& prop,
                                         const ReductionKernel& kernel,
                                         const DensityMatrix& rho0,
                                         std::uint64_t traj_index) {
  if (std::abs(rho0.trace_weight() - 1.0) > 1e-8)
    throw std::invalid_argument("initial density must have unit trace");
  const int n = kernel.n_sites();
  const int m = rho0.particle_count;
  const long dim = rho0.dim();

  RngStream rng(config.seed, traj_index);
  const std::vector<double> event_times = sample_poisson_times(
      static_cast<double>(m) * config.nu, config.horizon, rng);
  const std::vector<double> sample_times = config.sample_times();
  const auto& mgrid = kernel.packet().grid();

  DensityTrajectory record;
  record.seed = config.seed;
  record.index = traj_index;
  record.mode = config.mode;

  DensityMatrix state = rho0;
  double t_last = 0.0;
  std::size_t si = 0;

  auto conjugate = [&](const DensityMatrix& rho, double dt) {
    const Eigen::MatrixXcd u = prop.matrix(dt);
    DensityMatrix out = rho;
    out.entries = u * rho.entries * u.adjoint();
    return out;
  };
  auto take_snapshot = [&](double s) {
    record.snapshots.push_back(DensitySnapshot{s, conjugate(state, s - t_last)});
  };

  for (double te : event_times) {
    while (si < sample_times.size() && sample_times[si] <= te)
      take_snapshot(sample_times[si++]);
    state = conjugate(state, te - t_last);
    t_last = te;

    int y_index;
    if (config.mode == EvolutionMode::linear) {
      y_index =
          sample_index_from_density(kernel.packet().density(), mgrid.step, rng);
    } else {
      // density Tr{E(y) rho} |f0(y)|^2 h over the grid
      Eigen::VectorXd site_weight = Eigen::VectorXd::Zero(n);
      for (int k = 1; k <= m; ++k)
        for (long a = 0; a < dim; ++a)
          site_weight[digit(a, k, n, m)] += state.entries(a, a).real();
      site_weight /= static_cast<double>(m);
      const Eigen::VectorXd density =
          kernel.shifted_density().transpose() * site_weight;
      y_index = sample_index_from_density(density, mgrid.step, rng);
    }
    const double y = mgrid.points[y_index];
    state = mixing_kick(state, kernel, y);
    if (config.mode == EvolutionMode::normalized) state = state.normalized();
    record.events.push_back(TrajectoryEvent{te, y});
  }
  while (si < sample_times.size()) take_snapshot(sample_times[si++]);
  return record;
}

WaveFunction labeled_pure_state(const std::vector<LabeledEvent>& events,
                                const UnitaryPropagator& prop,
                                const ReductionKernel& kernel,
                                const WaveFunction& eta, double t) {
  const int n = kernel.n_sites();
  const int m = eta.particle_count;
  WaveFunction state = eta;
  double t_last = 0.0;
  for (const auto& ev : events) {
    if (ev.label < 1 || ev.label > m)
      throw std::invalid_argument("particle label out of range");
    if (ev.t < t_last)
      throw std::invalid_argument("event times must be ordered");
    state = prop.evolve(state, ev.t - t_last);
    t_last = ev.t;
    const Eigen::VectorXcd g = kernel.factors_at(ev.y);
    for (long a = 0; a < state.amplitudes.size(); ++a)
      state.amplitudes[a] *= g[digit(a, ev.label, n, m)];
  }
  return prop.evolve(state, t - t_last);
}

double conditional_expectation_check(const std::vector<TrajectoryEvent>& events,
                                     const UnitaryPropagator& prop,
                                     const ReductionKernel& kernel,
                                     const WaveFunction& eta, double t) {
  const int m = eta.particle_count;
  const int n_events = static_cast<int>(events.size());
  long assignments = 1;
  for (int i = 0; i < n_events; ++i) {
    assignments *= m;
    if (assignments > 64)
      throw std::length_error("capacity: M^n label assignments exceed 64");
  }

  const long dim = eta.amplitudes.size();
  Eigen::MatrixXcd enumerated = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<LabeledEvent> labeled(n_events);
  for (long code = 0; code < assignments; ++code) {
    long rest = code;
    for (int i = 0; i < n_events; ++i) {
      labeled[i] = LabeledEvent{events[i].t, events[i].y,
                                static_cast<int>(rest % m) + 1};
      rest /= m;
    }
    const WaveFunction chi = labeled_pure_state(labeled, prop, kernel, eta, t);
    enumerated += eta.measure() * chi.amplitudes * chi.amplitudes.adjoint();
  }
  enumerated /= static_cast<double>(assignments);

  // iterated single mixing reductions over the same events
  DensityMatrix rho = pure_density(eta);
  double t_last = 0.0;
  for (const auto& ev : events) {
    const Eigen::MatrixXcd u = prop.matrix(ev.t - t_last);
    rho.entries = u * rho.entries * u.adjoint();
    t_last = ev.t;
    rho = mixing_kick(rho, kernel, ev.y);
  }
  const Eigen::MatrixXcd u = prop.matrix(t - t_last);
  rho.entries = u * rho.entries * u.adjoint();

  return (enumerated - rho.entries).cwiseAbs().maxCoeff();
}

double von_neumann_entropy(const DensityMatrix& rho) {
  if (std::abs(rho.trace_weight() - 1.0) > 1e-8)
    throw std::invalid_argument("entropy requires a normalized density matrix");
  if (rho.hermiticity_defect() > 1e-10)
    throw std::invalid_argument("density matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (rho.entries + rho.entries.adjoint()));
  double entropy = 0.0;
  for (long i = 0; i < es.eigenvalues().size(); ++i) {
    const double lambda = es.eigenvalues()[i];
    if (lambda < -1e-10)
      throw std::invalid_argument("density matrix has a negative eigenvalue");
    if (lambda > 0.0) entropy -= lambda * std::log(lambda);
  }
  return std::max(0.0, entropy);
}

WaveFunction symmetrize(const WaveFunction& psi, int particle_count) {
  if (psi.particle_count != particle_count)
    throw std::invalid_argument("particle count does not match the state");
  const int n = psi.grid->n_sites;
  const int m = particle_count;
  const long dim = psi.amplitudes.size();

  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(dim);
  long n_perms = 0;
  do {
    for (long a = 0; a < dim; ++a) {
      // destination digits are the source digits permuted
      long b = 0;
      for (int k = 1; k <= m; ++k) b = b * n + digit(a, perm[k - 1] + 1, n, m);
      acc[b] += psi.amplitudes[a];
    }
    ++n_perms;
  } while (std::next_permutation(perm.begin(), perm.end()));
  acc /= static_cast<double>(n_perms);

  WaveFunction out = psi;
  out.amplitudes = acc;
  if (out.norm2() < 1e-24)
    throw std::invalid_argument("state has zero symmetric component");
  return out.normalized();
}

Eigen::MatrixXcd swap_conjugate(const Eigen::MatrixXcd& m, int n_sites,
                                int particle_count, int a, int b) {
  const long dim = m.rows();
  std::vector<long> map(dim);
  for (long idx = 0; idx < dim; ++idx) {
    std::vector<int> digits(particle_count);
    for (int k = 1; k <= particle_count; ++k)
      digits[k - 1] = digit(idx, k, n_sites, particle_count);
    std::swap(digits[a - 1], digits[b - 1]);
    long out = 0;
    for (int k = 0; k < particle_count; ++k) out = out * n_sites + digits[k];
    map[idx] = out;
  }
  Eigen::MatrixXcd result(dim, dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j) result(map[i], map[j]) = m(i, j);
  return result;
}

}  // namespace chamber

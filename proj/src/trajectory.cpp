#include "chamber/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace chamber {

std::vector<double> sample_poisson_times(double nu, double horizon,
                                         RngStream& rng) {
  if (!(nu > 0.0)) throw std::invalid_argument("nu > 0 violated");
  if (horizon < 0.0) throw std::invalid_argument("horizon >= 0 violated");
  std::vector<double> times;
  double t = rng.exponential(nu);
  while (t < horizon) {
    times.push_back(t);
    t += rng.exponential(nu);
  }
  return times;
}

int sample_index_from_density(const Eigen::VectorXd& density, double h,
                              RngStream& rng) {
  const long n = density.size();
  Eigen::VectorXd cdf(n);
  double acc = 0.0;
  for (long i = 0; i < n; ++i) {
    acc += density[i] * h;
    cdf[i] = acc;
  }
  if (!(acc > 0.0)) throw std::runtime_error("density has zero total mass");
  const double u = rng.uniform() * acc;
  long lo = 0, hi = n - 1;
  while (lo < hi) {
    const long mid = (lo + hi) / 2;
    if (cdf[mid] < u)
      lo = mid + 1;
    else
      hi = mid;
  }
  return static_cast<int>(lo);
}

double sample_outcome(const ReductionKernel& kernel, const WaveFunction& chi,
                      RngStream& rng) {
  const Eigen::VectorXd density = output_density(kernel, chi);
  const int idx =
      sample_index_from_density(density, kernel.packet().grid().step, rng);
  return kernel.packet().grid().points[idx];
}

namespace {

void apply_kick(const ReductionKernel& kernel, int y_index,
                WaveFunction& state) {
  state.amplitudes =
      kernel.factors(y_index).cwiseProduct(state.amplitudes).eval();
}

}  // namespace

TrajectoryRecord run_trajectory(const SimConfig& config,
                                const UnitaryPropagator& prop,
                                const ReductionKernel& kernel,
                                const WaveFunction& eta,
                                std::uint64_t traj_index) {
  if (std::abs(eta.norm2() - 1.0) > 1e-8)
    throw std::invalid_argument("initial state must be normalized within 1e-8");

  RngStream rng(config.seed, traj_index);
  const std::vector<double> event_times =
      sample_poisson_times(config.nu, config.horizon, rng);
  const std::vector<double> sample_times = config.sample_times();
  const auto& mgrid = kernel.packet().grid();

  TrajectoryRecord record;
  record.seed = config.seed;
  record.index = traj_index;
  record.mode = config.mode;

  WaveFunction state = eta;  // the state at the last event time
  double t_last = 0.0;
  std::size_t si = 0;

  auto take_snapshot = [&](double s) {
    WaveFunction snap = prop.evolve(state, s - t_last);
    const double w =
        config.mode == EvolutionMode::linear ? snap.norm2() : 1.0;
    record.snapshots.push_back(StateSnapshot{s, std::move(snap), w});
    if (config.mode == EvolutionMode::linear) record.weight_path.push_back(w);
  };

  for (double te : event_times) {
    while (si < sample_times.size() && sample_times[si] <= te)
      take_snapshot(sample_times[si++]);

    state = prop.evolve(state, te - t_last);
    t_last = te;

    int y_index;
    if (config.mode == EvolutionMode::linear) {
      y_index =
          sample_index_from_density(kernel.packet().density(), mgrid.step, rng);
    } else {
      const Eigen::VectorXd density = output_density(kernel, state);
      y_index = sample_index_from_density(density, mgrid.step, rng);
    }
    apply_kick(kernel, y_index, state);
    if (config.mode == EvolutionMode::normalized) state = state.normalized();
    record.events.push_back(TrajectoryEvent{te, mgrid.points[y_index]});
  }
  while (si < sample_times.size()) take_snapshot(sample_times[si++]);
  return record;
}

WaveFunction chronological_reduction(const std::vector<TrajectoryEvent>& events,
                                     const UnitaryPropagator& prop,
                                     const ReductionKernel& kernel,
                                     const WaveFunction& eta, double t,
                                     bool renormalize) {
  for (std::size_t i = 1; i < events.size(); ++i)
    if (!(events[i].t > events[i - 1].t))
      throw std::invalid_argument("event times must be strictly increasing");

  WaveFunction state = eta;
  double t_last = 0.0;
  const auto& mgrid = kernel.packet().grid();
  for (const auto& ev : events) {
    if (ev.t > t) break;
    state = prop.evolve(state, ev.t - t_last);
    t_last = ev.t;
    apply_kick(kernel, mgrid.index_of(ev.y), state);
    if (renormalize) state = state.normalized();
  }
  return prop.evolve(state, t - t_last);
}

EnsembleStats run_jump_ensemble(const SimConfig& config,
                                const UnitaryPropagator& prop,
                                const ReductionKernel& kernel,
                                const WaveFunction& eta) {
  const std::vector<double> times = config.sample_times();
  const long n_traj = config.trajectories;
  const int dim = static_cast<int>(eta.amplitudes.size());
  const double measure = eta.measure();

  struct Slot {
    std::vector<Eigen::VectorXcd> states;
    std::vector<double> weights;
  };
  std::vector<Slot> slots(n_traj);

  auto work = [&](long begin, long end) {
    for (long i = begin; i < end; ++i) {
      TrajectoryRecord rec = run_trajectory(config, prop, kernel, eta,
                                            static_cast<std::uint64_t>(i));
      Slot& slot = slots[i];
      slot.states.reserve(rec.snapshots.size());
      slot.weights.reserve(rec.snapshots.size());
      for (auto& snap : rec.snapshots) {
        slot.states.push_back(std::move(snap.state.amplitudes));
        slot.weights.push_back(snap.weight);
      }
    }
  };

  const int n_threads = std::max(1, config.threads);
  if (n_threads == 1) {
    work(0, n_traj);
  } else {
    std::vector<std::thread> pool;
    const long chunk = (n_traj + n_threads - 1) / n_threads;
    for (int k = 0; k < n_threads; ++k) {
      const long begin = k * chunk;
      const long end = std::min(n_traj, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  EnsembleStats stats;
  stats.times = times;
  stats.count = n_traj;
  const std::size_t nt = times.size();
  const int n_sites = eta.grid->n_sites;
  const double n = static_cast<double>(n_traj);

  auto position_of = [&](const Eigen::VectorXcd& v) {
    const long block = v.size() / n_sites;
    double x = 0.0;
    for (int j = 0; j < n_sites; ++j)
      x += eta.grid->positions[j] *
           (v.segment(j * block, block).squaredNorm() * measure);
    return x / (v.squaredNorm() * measure);
  };

  // two passes keep the variances exact for degenerate ensembles
  std::vector<Eigen::MatrixXcd> sum(nt, Eigen::MatrixXcd::Zero(dim, dim));
  std::vector<double> sw(nt, 0.0), sx(nt, 0.0);
  for (long i = 0; i < n_traj; ++i)
    for (std::size_t k = 0; k < nt; ++k) {
      const Eigen::VectorXcd& v = slots[i].states[k];
      sum[k] += measure * v * v.adjoint();
      sw[k] += slots[i].weights[k];
      sx[k] += position_of(v);
    }
  for (std::size_t k = 0; k < nt; ++k) {
    stats.mean_state.push_back(sum[k] / n);
    stats.mean_norm2.push_back(sw[k] / n);
    stats.mean_x.push_back(sx[k] / n);
  }

  std::vector<Eigen::MatrixXd> var(nt, Eigen::MatrixXd::Zero(dim, dim));
  std::vector<double> vw(nt, 0.0), vx(nt, 0.0);
  for (long i = 0; i < n_traj; ++i)
    for (std::size_t k = 0; k < nt; ++k) {
      const Eigen::VectorXcd& v = slots[i].states[k];
      var[k] +=
          (measure * v * v.adjoint() - stats.mean_state[k]).cwiseAbs2();
      const double dw = slots[i].weights[k] - stats.mean_norm2[k];
      vw[k] += dw * dw;
      const double dx = position_of(v) - stats.mean_x[k];
      vx[k] += dx * dx;
    }
  for (std::size_t k = 0; k < nt; ++k) {
    stats.sem_state.push_back((var[k] / (n * n)).cwiseSqrt());
    stats.sem_norm2.push_back(std::sqrt(vw[k]) / n);
    stats.sem_x.push_back(std::sqrt(vx[k]) / n);
  }
  return stats;
}

WaveFunction initial_state(const SimConfig& config, const GridPtr& grid) {
  if (config.init == "bump")
    return gaussian_bump(grid, 0.0, grid->spacing * grid->n_sites / 8.0);
  if (config.init.rfind("site:", 0) == 0)
    return point_mass(grid, std::stoi(config.init.substr(5)));
  if (config.init.rfind("pair:", 0) == 0) {
    const std::string rest = config.init.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("init pair requires 'pair:<i>:<j>'");
    return site_superposition(grid, {std::stoi(rest.substr(0, colon)),
                                     std::stoi(rest.substr(colon + 1))});
  }
  throw std::invalid_argument("init must be 'bump', 'site:<j>' or 'pair:<i>:<j>'");
}

}  // namespace chamber

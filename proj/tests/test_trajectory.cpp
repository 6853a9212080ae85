#include <doctest.h>

#include <cmath>

#include "chamber/trajectory.hpp"

using namespace chamber;

namespace {

// Regularized upper incomplete gamma Q(a, x), for chi-square p-values.
double gamma_q(double a, double x) {
  auto gser = [](double a_, double x_) {
    double sum = 1.0 / a_, del = sum, ap = a_;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x_ / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-14) break;
    }
    return sum * std::exp(-x_ + a_ * std::log(x_) - std::lgamma(a_));
  };
  auto gcf = [](double a_, double x_) {
    double b = x_ + 1.0 - a_, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
      const double an = -i * (i - a_);
      b += 2.0;
      d = an * d + b;
      if (std::abs(d) < 1e-300) d = 1e-300;
      c = b + an / c;
      if (std::abs(c) < 1e-300) c = 1e-300;
      d = 1.0 / d;
      const double del = d * c;
      h *= del;
      if (std::abs(del - 1.0) < 1e-14) break;
    }
    return std::exp(-x_ + a_ * std::log(x_) - std::lgamma(a_)) * h;
  };
  if (x < a + 1.0) return 1.0 - gser(a, x);
  return gcf(a, x);
}

SimConfig base_config() {
  SimConfig c;
  c.n_sites = 16;
  c.spacing = 0.25;
  c.nu = 2.0;
  c.kappa = 0.3;
  c.horizon = 1.0;
  c.seed = 777;
  return c;
}

struct Setup {
  GridPtr grid;
  UnitaryPropagator prop;
  ReductionKernel kernel;
};

Setup make_setup(const SimConfig& c, bool free_h = true) {
  auto grid = build_grid(c.n_sites, c.spacing, c.boundary);
  std::vector<double> pot(c.n_sites, 0.0);
  DenseOperator h =
      free_h ? hamiltonian(*grid, c.mass, pot)
             : make_operator(Eigen::MatrixXcd::Zero(c.n_sites, c.n_sites), true);
  auto packet = gaussian_packet(c.half_width, c.step, 0.0, c.hbar);
  return Setup{grid, UnitaryPropagator(h, c.hbar),
               ReductionKernel(packet, position_operator(*grid), c.kappa)};
}

}  // namespace

TEST_SUITE("trajectory") {

TEST_CASE("zero horizon draws no events") {
  RngStream rng(1);
  CHECK(sample_poisson_times(2.0, 0.0, rng).empty());
}

TEST_CASE("poisson count matches its mean over many draws") {
  const double nu = 2.0, horizon = 1.0;
  const int n = 100000;
  RngStream rng(2024);
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    total += static_cast<double>(sample_poisson_times(nu, horizon, rng).size());
  const double mean = total / n;
  const double sem = std::sqrt(nu * horizon / n);
  CHECK(std::abs(mean - nu * horizon) <= 3.0 * sem);
}

TEST_CASE("fixed seeds reproduce the same arrival list") {
  RngStream a(99, 5), b(99, 5);
  auto ta = sample_poisson_times(3.0, 2.0, a);
  auto tb = sample_poisson_times(3.0, 2.0, b);
  REQUIRE(ta.size() == tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) CHECK(ta[i] == tb[i]);
}

TEST_CASE("zero coupling outcomes follow the packet law") {
  auto c = base_config();
  c.kappa = 0.0;
  auto s = make_setup(c);
  auto eta = site_superposition(s.grid, {3, 12});
  const auto density = output_density(s.kernel, eta);
  for (int i = 0; i < density.size(); i += 401)
    CHECK(density[i] == doctest::Approx(s.kernel.packet().density()[i]).epsilon(1e-12));

  RngStream rng(5);
  double mean = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const int idx = sample_index_from_density(s.kernel.packet().density(),
                                              s.kernel.packet().grid().step, rng);
    mean += s.kernel.packet().grid().points[idx];
  }
  mean /= n;
  // var of the packet law is 1/(2 pi)
  CHECK(std::abs(mean) <= 3.0 * std::sqrt(1.0 / (2.0 * kPi) / n));
}

TEST_CASE("point-mass outcomes center on kappa x0") {
  auto c = base_config();
  auto s = make_setup(c);
  const int site = 13;
  auto eta = point_mass(s.grid, site);
  const Eigen::VectorXd density = output_density(s.kernel, eta);
  const double h = s.kernel.packet().grid().step;
  RngStream rng(6);
  double mean = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    mean += s.kernel.packet().grid().points[sample_index_from_density(density, h, rng)];
  mean /= n;
  const double expected = c.kappa * s.grid->positions[site];
  CHECK(std::abs(mean - expected) <= 3.0 * std::sqrt(1.0 / (2.0 * kPi) / n));

  // the public draw is reproducible under a fixed stream
  RngStream r1(7, 3), r2(7, 3);
  CHECK(sample_outcome(s.kernel, eta, r1) == sample_outcome(s.kernel, eta, r2));
}

TEST_CASE("a trajectory without events is free evolution") {
  auto c = base_config();
  c.samples = 1;
  auto s = make_setup(c);
  auto eta = gaussian_bump(s.grid, 0.0, 0.5);
  bool found = false;
  for (std::uint64_t idx = 0; idx < 50 && !found; ++idx) {
    auto rec = run_trajectory(c, s.prop, s.kernel, eta, idx);
    if (!rec.events.empty()) continue;
    found = true;
    auto expected = s.prop.evolve(eta, c.horizon);
    CHECK((rec.snapshots.back().state.amplitudes - expected.amplitudes)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
  CHECK(found);
}

TEST_CASE("frozen dynamics applies bare kicks") {
  auto c = base_config();
  c.mode = EvolutionMode::linear;
  c.samples = 1;
  auto s = make_setup(c, /*free_h=*/false);
  auto eta = site_superposition(s.grid, {2, 14});
  bool found = false;
  for (std::uint64_t idx = 0; idx < 80 && !found; ++idx) {
    auto rec = run_trajectory(c, s.prop, s.kernel, eta, idx);
    if (rec.events.size() != 1) continue;
    found = true;
    const int yi = s.kernel.packet().grid().index_of(rec.events[0].y);
    Eigen::VectorXcd expected =
        s.kernel.factors(yi).cwiseProduct(eta.amplitudes);
    CHECK((rec.snapshots.back().state.amplitudes - expected).cwiseAbs().maxCoeff() <
          1e-12);
  }
  CHECK(found);
}

TEST_CASE("replay reproduces recorded snapshots bitwise") {
  auto c = base_config();
  c.samples = 5;
  for (EvolutionMode mode : {EvolutionMode::linear, EvolutionMode::normalized}) {
    c.mode = mode;
    auto s = make_setup(c);
    auto eta = gaussian_bump(s.grid, -0.3, 0.6);
    auto rec = run_trajectory(c, s.prop, s.kernel, eta, 4);
    for (const auto& snap : rec.snapshots) {
      std::vector<TrajectoryEvent> prior;
      for (const auto& ev : rec.events)
        if (ev.t < snap.t) prior.push_back(ev);
      auto replay = chronological_reduction(prior, s.prop, s.kernel, eta, snap.t,
                                            mode == EvolutionMode::normalized);
      CHECK((replay.amplitudes - snap.state.amplitudes).cwiseAbs().maxCoeff() ==
            0.0);
    }
  }
}

TEST_CASE("empty replay is unitary evolution") {
  auto c = base_config();
  auto s = make_setup(c);
  auto eta = gaussian_bump(s.grid, 0.0, 0.5);
  auto out = chronological_reduction({}, s.prop, s.kernel, eta, 0.8);
  auto expected = s.prop.evolve(eta, 0.8);
  CHECK((out.amplitudes - expected.amplitudes).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unordered events are rejected") {
  auto c = base_config();
  auto s = make_setup(c);
  auto eta = point_mass(s.grid, 8);
  std::vector<TrajectoryEvent> bad = {{0.5, 0.0}, {0.2, 0.25}};
  CHECK_THROWS_WITH_AS(chronological_reduction(bad, s.prop, s.kernel, eta, 1.0),
                       doctest::Contains("strictly increasing"),
                       std::invalid_argument);
}

TEST_CASE("commuting diagonal kicks may be permuted when H = 0") {
  auto c = base_config();
  auto s = make_setup(c, /*free_h=*/false);
  auto eta = site_superposition(s.grid, {1, 8, 14});
  std::vector<TrajectoryEvent> events = {{0.1, 0.25}, {0.4, -0.5}, {0.9, 1.0}};
  std::vector<TrajectoryEvent> permuted = {{0.1, 1.0}, {0.4, 0.25}, {0.9, -0.5}};
  auto a = chronological_reduction(events, s.prop, s.kernel, eta, 1.0);
  auto b = chronological_reduction(permuted, s.prop, s.kernel, eta, 1.0);
  CHECK((a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("normalized snapshots have unit norm") {
  auto c = base_config();
  c.samples = 4;
  auto s = make_setup(c);
  auto eta = gaussian_bump(s.grid, 0.2, 0.4);
  for (std::uint64_t idx = 0; idx < 10; ++idx) {
    auto rec = run_trajectory(c, s.prop, s.kernel, eta, idx);
    for (const auto& snap : rec.snapshots)
      CHECK(std::abs(snap.state.norm() - 1.0) <= 1e-10);
  }
}

TEST_CASE("likelihood weights are a martingale under the input law") {
  auto c = base_config();
  c.mode = EvolutionMode::linear;
  c.trajectories = 10000;
  c.samples = 1;
  auto s = make_setup(c);
  auto eta = site_superposition(s.grid, {5, 11});
  auto stats = run_jump_ensemble(c, s.prop, s.kernel, eta);
  const double mean = stats.mean_norm2.back();
  const double sem = stats.sem_norm2.back();
  CHECK(std::abs(mean - 1.0) <= 3.0 * sem);
}

TEST_CASE("output event counts stay Poisson") {
  auto c = base_config();
  c.mode = EvolutionMode::normalized;
  c.samples = 1;
  auto s = make_setup(c);
  auto eta = site_superposition(s.grid, {4, 12});
  const int n = 3000;
  std::vector<long> counts;
  counts.reserve(n);
  for (int i = 0; i < n; ++i)
    counts.push_back(static_cast<long>(
        run_trajectory(c, s.prop, s.kernel, eta, i).events.size()));

  const double lambda = c.nu * c.horizon;
  const int kmax = 6;  // bins 0..5 and >=6
  std::vector<double> expected(kmax + 1, 0.0), observed(kmax + 1, 0.0);
  double pk = std::exp(-lambda), tail = 1.0;
  for (int k = 0; k < kmax; ++k) {
    expected[k] = n * pk;
    tail -= pk;
    pk *= lambda / (k + 1);
  }
  expected[kmax] = n * tail;
  for (long cnt : counts) observed[std::min<long>(cnt, kmax)] += 1.0;

  double stat = 0.0;
  for (int k = 0; k <= kmax; ++k)
    stat += (observed[k] - expected[k]) * (observed[k] - expected[k]) / expected[k];
  const double p_value = gamma_q(kmax / 2.0, stat / 2.0);
  CHECK(p_value >= 0.01);
}

TEST_CASE("weighted linear averages match normalized averages") {
  auto c = base_config();
  c.n_sites = 8;
  c.trajectories = 10000;
  c.samples = 1;
  auto make_eta = [](const GridPtr& g) { return site_superposition(g, {2, 6}); };

  c.mode = EvolutionMode::linear;
  auto s = make_setup(c);
  auto eta = make_eta(s.grid);

  // g = position expectation of the normalized state at T
  double lin_sum = 0.0, lin_sum2 = 0.0;
  for (long i = 0; i < c.trajectories; ++i) {
    auto rec = run_trajectory(c, s.prop, s.kernel, eta, i);
    const auto& snap = rec.snapshots.back();
    const double g = snap.state.mean_position() / snap.state.norm2();
    const double val = g * snap.weight;
    lin_sum += val;
    lin_sum2 += val * val;
  }
  const double n = c.trajectories;
  const double lin_mean = lin_sum / n;
  const double lin_sem = std::sqrt((lin_sum2 / n - lin_mean * lin_mean) / n);

  c.mode = EvolutionMode::normalized;
  double nrm_sum = 0.0, nrm_sum2 = 0.0;
  for (long i = 0; i < c.trajectories; ++i) {
    auto rec = run_trajectory(c, s.prop, s.kernel, eta, i);
    const double g = rec.snapshots.back().state.mean_position();
    nrm_sum += g;
    nrm_sum2 += g * g;
  }
  const double nrm_mean = nrm_sum / n;
  const double nrm_sem = std::sqrt((nrm_sum2 / n - nrm_mean * nrm_mean) / n);

  CHECK(std::abs(lin_mean - nrm_mean) <=
        3.0 * std::sqrt(lin_sem * lin_sem + nrm_sem * nrm_sem));
}

TEST_CASE("kicks localize a two-site state on average") {
  auto c = base_config();
  c.mode = EvolutionMode::normalized;
  c.horizon = 2.5;
  c.samples = 1;
  auto s = make_setup(c, /*free_h=*/false);
  auto eta = site_superposition(s.grid, {2, 14});  // x = -1.5 and 1.5

  const int n_traj = 1000, max_kicks = 5;
  std::vector<double> dsum(max_kicks, 0.0), dsum2(max_kicks, 0.0);
  std::vector<long> dcount(max_kicks, 0);
  for (int i = 0; i < n_traj; ++i) {
    auto rec = run_trajectory(c, s.prop, s.kernel, eta, i);
    WaveFunction state = eta;
    double prev_var = state.position_variance();
    for (std::size_t k = 0; k < rec.events.size() && k < max_kicks; ++k) {
      const int yi = s.kernel.packet().grid().index_of(rec.events[k].y);
      state.amplitudes = s.kernel.factors(yi).cwiseProduct(state.amplitudes);
      state = state.normalized();
      const double var = state.position_variance();
      const double d = var - prev_var;
      dsum[k] += d;
      dsum2[k] += d * d;
      dcount[k] += 1;
      prev_var = var;
    }
  }
  for (int k = 0; k < max_kicks; ++k) {
    REQUIRE(dcount[k] > 50);
    const double m = dsum[k] / dcount[k];
    const double sem =
        std::sqrt((dsum2[k] / dcount[k] - m * m) / dcount[k]);
    CHECK(m <= 3.0 * sem);  // variance does not grow in expectation
  }
}

TEST_CASE("a zero-coupling ensemble is deterministic up to zero sem") {
  auto c = base_config();
  c.n_sites = 8;
  c.kappa = 0.0;
  c.trajectories = 50;
  c.samples = 2;
  c.mode = EvolutionMode::normalized;
  auto s = make_setup(c);
  auto eta = site_superposition(s.grid, {2, 5});
  auto stats = run_jump_ensemble(c, s.prop, s.kernel, eta);
  // kicks are the identity, so every trajectory carries U(t) eta exactly
  auto evolved = s.prop.evolve(eta, c.horizon);
  Eigen::MatrixXcd expected =
      0.25 * evolved.amplitudes * evolved.amplitudes.adjoint();
  CHECK((stats.mean_state.back() - expected).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(stats.sem_state.back().maxCoeff() <= 1e-13);
  CHECK(stats.sem_x.back() <= 1e-13);
}

TEST_CASE("ensemble statistics do not depend on the thread count") {
  auto c = base_config();
  c.n_sites = 8;
  c.trajectories = 400;
  c.samples = 3;
  c.mode = EvolutionMode::linear;
  auto s = make_setup(c);
  auto eta = site_superposition(s.grid, {1, 6});

  c.threads = 1;
  auto one = run_jump_ensemble(c, s.prop, s.kernel, eta);
  c.threads = 3;
  auto three = run_jump_ensemble(c, s.prop, s.kernel, eta);
  for (std::size_t k = 0; k < one.times.size(); ++k) {
    CHECK((one.mean_state[k] - three.mean_state[k]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(one.mean_norm2[k] == three.mean_norm2[k]);
  }
}

}  // TEST_SUITE

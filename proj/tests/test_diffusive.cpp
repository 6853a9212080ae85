#include <doctest.h>

#include <cmath>
#include <random>

#include "chamber/diffusive.hpp"
#include "chamber/trajectory.hpp"

using namespace chamber;

namespace {

struct Setup {
  GridPtr grid;
  DenseOperator h;
  DenseOperator r;
  PacketPtr packet;
};

Setup make_setup(int n = 8, double spacing = 0.25, bool free_h = true) {
  auto grid = build_grid(n, spacing);
  DenseOperator h = free_h
                        ? hamiltonian(*grid, 1.0, std::vector<double>(n, 0.0))
                        : make_operator(Eigen::MatrixXcd::Zero(n, n), true);
  return Setup{grid, h, position_operator(*grid),
               gaussian_packet(8.0, 1.0 / 256.0)};
}

Eigen::VectorXcd random_unit(int n, std::mt19937_64& gen) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(dist(gen), dist(gen));
  return v / v.norm();
}

// chirped packet with zero mean momentum and generic third-order structure
PacketPtr chirped_packet(double alpha, double step) {
  auto grid = make_meter_grid(8.0, step);
  const double c = 1.0 / (2.0 * kPi);
  Eigen::VectorXcd vals(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const double y = grid.points[i];
    vals[i] = std::exp(-0.5 * kPi * y * y) *
              std::exp(cplx(0.0, alpha * (y * y * y / 3.0 - c * y)));
  }
  return std::make_shared<const PointerPacket>(
      PointerPacket::custom(grid, vals));
}

}  // namespace

TEST_SUITE("diffusive") {

TEST_CASE("K carries the closed-form Hermitian part") {
  auto s = make_setup();
  for (int m : {1, 2}) {
    auto hm = hamiltonian(*s.grid, 1.0, std::vector<double>(8, 0.0), nullptr, m);
    auto params = make_diffusion_params(hm, s.r, 0.7, *s.packet,
                                        NoiseKind::complex_v, 1e-3, m);
    CHECK(params.hermitian_part_defect() <= 1e-12);
  }
}

TEST_CASE("real increments have variance sigma2 dt") {
  auto s = make_setup();
  RngStream rng(2);
  const double dt = 1e-3;
  const int n = 1000000;
  auto path = wiener_increments(*s.packet, NoiseKind::real_u, dt, n, rng);
  const double mean = path.du.mean();
  const double var = path.du.squaredNorm() / n - mean * mean;
  const double target = s.packet->sigma2() * dt;
  CHECK(std::abs(mean) <= 3.0 * std::sqrt(target / n));
  CHECK(std::abs(var - target) <= 3.0 * target * std::sqrt(2.0 / n));
}

TEST_CASE("gaussian-packet complex increments are real with variance pi/2 dt") {
  auto s = make_setup();
  RngStream rng(3);
  const double dt = 1e-3;
  const int n = 1000000;
  auto path = wiener_increments(*s.packet, NoiseKind::complex_v, dt, n, rng);
  CHECK(path.dv.imag().cwiseAbs().maxCoeff() == 0.0);
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i) mean += path.dv[i].real();
  mean /= n;
  for (int i = 0; i < n; ++i) var += std::norm(path.dv[i]);
  var = var / n - mean * mean;
  const double target = 0.5 * kPi * dt;
  CHECK(std::abs(var - target) <= 3.0 * target * std::sqrt(2.0 / n));
  CHECK(std::abs(mean) <= 3.0 * std::sqrt(target / n));

  RngStream r1(9, 4), r2(9, 4);
  auto p1 = wiener_increments(*s.packet, NoiseKind::complex_v, dt, 16, r1);
  auto p2 = wiener_increments(*s.packet, NoiseKind::complex_v, dt, 16, r2);
  CHECK((p1.dv - p2.dv).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("boosted-packet complex increments split into both quadratures") {
  auto packet = gaussian_packet(8.0, 1.0 / 256.0, 0.8);
  const cplx c1 = packet->lprime_second_moment();
  const double c2 = packet->lprime_abs_moment();
  // analytic second moments of L' = -pi y + i p0 / hbar
  CHECK(std::abs(c1 - cplx(0.5 * kPi - 0.64, 0.0)) <= 1e-5);
  CHECK(std::abs(c2 - (0.5 * kPi + 0.64)) <= 1e-5);

  RngStream rng(5);
  const double dt = 1e-2;
  const int n = 200000;
  auto path = wiener_increments(*packet, NoiseKind::complex_v, dt, n, rng);
  cplx sym{0.0, 0.0};
  double abs2 = 0.0;
  for (int i = 0; i < n; ++i) {
    sym += path.dv[i] * path.dv[i];
    abs2 += std::norm(path.dv[i]);
  }
  sym /= n;
  abs2 /= n;
  CHECK(std::abs(sym - c1 * dt) <= 4.0 * c2 * dt / std::sqrt(n));
  CHECK(std::abs(abs2 - c2 * dt) <= 4.0 * c2 * dt / std::sqrt(n));
}

TEST_CASE("mean-field Hamiltonian adds the momentum potential") {
  auto s = make_setup();
  auto same = mean_field_hamiltonian(s.h, s.r, 0.5, 0.0);
  CHECK((same.entries - s.h.entries).cwiseAbs().maxCoeff() == 0.0);
  auto zero = mean_field_hamiltonian(s.h, s.r, 0.0, 1.0);
  CHECK((zero.entries - s.h.entries).cwiseAbs().maxCoeff() == 0.0);
  auto shifted = mean_field_hamiltonian(s.h, s.r, 0.5, 1.0);
  Eigen::MatrixXcd diff = shifted.entries - s.h.entries;
  for (int j = 0; j < 8; ++j)
    CHECK(diff(j, j).real() == doctest::Approx(-0.5 * s.grid->positions[j]));
}

TEST_CASE("linear wave step freezes without coupling or Hamiltonian") {
  auto s = make_setup(8, 0.25, /*free_h=*/false);
  auto params = make_diffusion_params(s.h, s.r, 0.0, *s.packet,
                                      NoiseKind::complex_v, 1e-3);
  std::mt19937_64 gen(7);
  auto chi = random_unit(8, gen);
  auto out = diffusive_sse_step(chi, params, cplx(0.3, 0.0));
  CHECK((out - chi).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero coupling reduces the wave step to deterministic evolution") {
  auto s = make_setup();
  const double dt = 1e-4;
  auto params =
      make_diffusion_params(s.h, s.r, 0.0, *s.packet, NoiseKind::complex_v, dt);
  std::mt19937_64 gen(11);
  auto chi = random_unit(8, gen);
  auto stepped = diffusive_sse_step(chi, params, cplx(0.5, 0.1));
  UnitaryPropagator prop(s.h);
  auto exact = prop.apply(chi, dt);
  CHECK((stepped - exact).cwiseAbs().maxCoeff() <=
        dt * dt * s.h.entries.cwiseAbs().maxCoeff() *
            s.h.entries.cwiseAbs().maxCoeff() * 8.0);
}

TEST_CASE("linear wave ensemble conserves the mean-square norm") {
  auto s = make_setup(8, 0.5);
  const double dt = 1e-3, horizon = 0.5, gamma = 0.5;
  auto params = make_diffusion_params(s.h, s.r, gamma, *s.packet,
                                      NoiseKind::complex_v, dt);
  const int steps = static_cast<int>(horizon / dt);
  const int n_paths = 10000;
  const double a = s.grid->spacing;
  double sum = 0.0, sum2 = 0.0;
  for (int p = 0; p < n_paths; ++p) {
    RngStream rng(31415, p);
    auto path = wiener_increments(*s.packet, NoiseKind::complex_v, dt, steps, rng);
    std::mt19937_64 gen(1000 + p);
    Eigen::VectorXcd chi = random_unit(8, gen) / std::sqrt(a);
    for (int i = 0; i < steps; ++i)
      chi = diffusive_sse_step(chi, params, path.dv[i]);
    const double n2 = chi.squaredNorm() * a;
    sum += n2;
    sum2 += n2 * n2;
  }
  const double mean = sum / n_paths;
  const double sem = std::sqrt((sum2 / n_paths - mean * mean) / n_paths);
  CHECK(std::abs(mean - 1.0) <= std::max(3.0 * sem, 0.01));
}

TEST_CASE("norm-preserving step is unitary without noise") {
  auto s = make_setup();
  const double dt = 1e-4;
  auto params =
      make_diffusion_params(s.h, s.r, 0.7, *s.packet, NoiseKind::real_u, dt);
  std::mt19937_64 gen(13);
  auto psi = random_unit(8, gen);
  auto out = unitary_diffusive_step(psi, params, 0.0);
  UnitaryPropagator prop(s.h);
  auto exact = prop.apply(psi, dt);
  CHECK(out.defect <= 1e-8);
  CHECK((out.psi - exact).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("frozen Hamiltonian gives pure phase diffusion") {
  auto s = make_setup(8, 0.25, /*free_h=*/false);
  const double dt = 1e-6;
  auto params =
      make_diffusion_params(s.h, s.r, 0.5, *s.packet, NoiseKind::real_u, dt);
  std::mt19937_64 gen(17);
  auto psi = random_unit(8, gen);
  RngStream rng(23);
  const double du = std::sqrt(params.sigma2 * dt) * rng.normal();
  auto out = unitary_diffusive_step(psi, params, du);
  CHECK(out.defect <= 1e-10);  // moduli constant before projection
  for (int j = 0; j < 8; ++j) {
    const cplx exact =
        psi[j] * std::exp(cplx(0.0, 0.5 * s.grid->positions[j] * du));
    CHECK(std::abs(out.psi[j] - exact) <= 1e-9);
  }
}

TEST_CASE("unprojected norm defect scales linearly in dt") {
  auto s = make_setup();
  const double horizon = 0.2, gamma = 1.0;
  auto defect_at = [&](double dt) {
    double total = 0.0;
    const int steps = static_cast<int>(horizon / dt);
    const int runs = 12;
    auto params =
        make_diffusion_params(s.h, s.r, gamma, *s.packet, NoiseKind::real_u, dt);
    for (int run = 0; run < runs; ++run) {
      RngStream rng(777, run);
      auto path =
          wiener_increments(*s.packet, NoiseKind::real_u, dt, steps, rng);
      std::mt19937_64 gen(50 + run);
      Eigen::VectorXcd psi = random_unit(8, gen);
      double acc = 0.0;
      for (int i = 0; i < steps; ++i) {
        auto out = unitary_diffusive_step(psi, params, path.du[i]);
        acc += out.defect;
        psi = out.psi;
      }
      total += acc;
    }
    return total / runs;
  };
  const double coarse = defect_at(2e-4);
  const double fine = defect_at(1e-4);
  CHECK(coarse / fine == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("density step without coupling is an Euler Liouville step") {
  auto s = make_setup();
  const double dt = 1e-4;
  auto params =
      make_diffusion_params(s.h, s.r, 0.0, *s.packet, NoiseKind::complex_v, dt);
  std::mt19937_64 gen(19);
  auto psi = random_unit(8, gen);
  Eigen::MatrixXcd rho = psi * psi.adjoint();
  double dev = 0.0;
  auto out = diffusive_density_step(rho, params, cplx(0.2, 0.1), &dev);
  Eigen::MatrixXcd expected =
      rho - dt * cplx(0.0, 1.0) * (s.h.entries * rho - rho * s.h.entries);
  CHECK((out - expected).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(dev <= 1e-14);
}

TEST_CASE("density trace is preserved in the mean") {
  auto s = make_setup(4, 0.5);
  const double dt = 1e-3, horizon = 0.3, gamma = 0.6;
  auto params = make_diffusion_params(s.h, s.r, gamma, *s.packet,
                                      NoiseKind::complex_v, dt);
  const int steps = static_cast<int>(horizon / dt);
  const int n_paths = 10000;
  std::mt19937_64 gen(23);
  auto psi = random_unit(4, gen);
  const Eigen::MatrixXcd rho0 = psi * psi.adjoint();
  double sum = 0.0, sum2 = 0.0;
  for (int p = 0; p < n_paths; ++p) {
    RngStream rng(2718, p);
    auto path = wiener_increments(*s.packet, NoiseKind::complex_v, dt, steps, rng);
    Eigen::MatrixXcd rho = rho0;
    for (int i = 0; i < steps; ++i)
      rho = diffusive_density_step(rho, params, path.dv[i]);
    const double tr = rho.trace().real();
    sum += tr;
    sum2 += tr * tr;
  }
  const double mean = sum / n_paths;
  const double sem = std::sqrt((sum2 / n_paths - mean * mean) / n_paths);
  CHECK(std::abs(mean - 1.0) <= std::max(3.0 * sem, 0.01));
}

TEST_CASE("matched noise ties the density equation to wave outer products") {
  auto s = make_setup(8, 0.5);
  const double dt = 1e-3, horizon = 0.2, gamma = 0.6;
  auto params = make_diffusion_params(s.h, s.r, gamma, *s.packet,
                                      NoiseKind::complex_v, dt);
  const int steps = static_cast<int>(horizon / dt);
  const int n_paths = 2000;
  std::mt19937_64 gen(29);
  auto chi0 = random_unit(8, gen);
  const Eigen::MatrixXcd rho0 = chi0 * chi0.adjoint();

  Eigen::MatrixXcd mean_wave = Eigen::MatrixXcd::Zero(8, 8);
  Eigen::MatrixXcd mean_density = Eigen::MatrixXcd::Zero(8, 8);
  for (int p = 0; p < n_paths; ++p) {
    RngStream rng(424242, p);
    auto path = wiener_increments(*s.packet, NoiseKind::complex_v, dt, steps, rng);
    Eigen::VectorXcd chi = chi0;
    Eigen::MatrixXcd rho = rho0;
    for (int i = 0; i < steps; ++i) {
      chi = diffusive_sse_step(chi, params, path.dv[i]);
      rho = diffusive_density_step(rho, params, path.dv[i]);
    }
    mean_wave += chi * chi.adjoint();
    mean_density += rho;
  }
  mean_wave /= n_paths;
  mean_density /= n_paths;
  mean_wave /= mean_wave.trace().real();
  mean_density /= mean_density.trace().real();
  CHECK(trace_distance(mean_wave, mean_density) <= 0.02);
}

TEST_CASE("noise kinds must not be mixed in one integrator step") {
  auto s = make_setup();
  auto pv = make_diffusion_params(s.h, s.r, 0.5, *s.packet,
                                  NoiseKind::complex_v, 1e-3);
  auto pu =
      make_diffusion_params(s.h, s.r, 0.5, *s.packet, NoiseKind::real_u, 1e-3);
  std::mt19937_64 gen(31);
  auto psi = random_unit(8, gen);
  CHECK_THROWS_WITH_AS(unitary_diffusive_step(psi, pv, 0.1),
                       doctest::Contains("noise kind"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(diffusive_sse_step(psi, pu, cplx(0.1, 0.0)),
                       doctest::Contains("noise kind"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      diffusive_density_step(psi * psi.adjoint(), pu, cplx(0.1, 0.0)),
      doctest::Contains("noise kind"), std::invalid_argument);
}

TEST_CASE("generator comparison vanishes without coupling") {
  auto s = make_setup();
  auto report = jump_generator_vs_diffusive({100.0, 400.0}, 0.0, s.h, s.r,
                                            s.packet);
  CHECK(report.errors[0] <= 1e-12);
  CHECK(report.errors[1] <= 1e-12);
}

TEST_CASE("symmetric packet generator errors follow the analytic overlap") {
  // for the gaussian packet the shifted-packet overlap is exp(-pi r^2 / 4),
  // so the generator error has the closed form
  //   max_(a,b) | nu (exp(-pi kappa^2 D^2/4) - 1) + pi gamma^2 D^2 / 4 |
  auto s = make_setup(16, 0.25);
  const double gamma = 1.0;
  const std::vector<double> nus = {100.0, 1000.0, 10000.0};
  auto report = jump_generator_vs_diffusive(nus, gamma, s.h, s.r, s.packet);
  for (std::size_t i = 0; i < nus.size(); ++i) {
    const double kappa = gamma / std::sqrt(nus[i]);
    double expected = 0.0;
    for (int a = 0; a < 16; ++a)
      for (int b = 0; b < 16; ++b) {
        const double d = s.grid->positions[a] - s.grid->positions[b];
        expected = std::max(
            expected, std::abs(nus[i] * (std::exp(-kPi * kappa * kappa * d * d / 4.0) -
                                         1.0) +
                               kPi * gamma * gamma * d * d / 4.0));
      }
    CHECK(std::abs(report.errors[i] - expected) <= 1e-6 * std::max(1.0, expected));
  }
  // the even packet autocorrelation makes the first correction quadratic,
  // one full order faster than the generic square-root rate
  CHECK(report.fitted_exponent == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("generic zero-momentum packet converges at the square-root rate") {
  auto grid = build_grid(8, 0.25);
  auto r = position_operator(*grid);
  auto h = hamiltonian(*grid, 1.0, std::vector<double>(8, 0.0));
  auto packet = chirped_packet(2.0, 1.0 / 1024.0);
  CHECK(std::abs(packet->p0()) <= 1e-9);
  auto report = jump_generator_vs_diffusive({100.0, 400.0, 1000.0, 2500.0, 10000.0},
                                            0.25, h, r, packet);
  CHECK(report.fitted_exponent >= 0.35);
  CHECK(report.fitted_exponent <= 0.65);
  CHECK(report.errors[0] / report.errors[1] >= 1.6);
  CHECK(report.errors[0] / report.errors[1] <= 2.4);
  CHECK(report.errors[3] / report.errors[4] >= 1.6);
  CHECK(report.errors[3] / report.errors[4] <= 2.4);
}

}  // TEST_SUITE

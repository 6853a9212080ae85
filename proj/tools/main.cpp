// Command-line front end: deterministic seeded runs with NDJSON event
// streams and CSV summaries. Exit codes: 0 success, 1 validation error,
// 2 failed verification check.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "chamber/diffusive.hpp"
#include "chamber/kick.hpp"
#include "chamber/mixing.hpp"
#include "chamber/oracle.hpp"
#include "chamber/output.hpp"
#include "chamber/trajectory.hpp"

namespace fs = std::filesystem;
using namespace chamber;

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string action = "mean-field";          // limits
  std::string pairing = "jump-vs-oracle";     // verify
  double tolerance = 0.02;                    // verify
};

SimConfig resolve_config(const CliOptions& opt) {
  SimConfig config;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw std::invalid_argument("cannot read config file: " + opt.config_path);
    std::ostringstream text;
    text << in.rdbuf();
    config = parse_config(text.str());
  }
  for (const auto& [key, value] : opt.overrides) apply_override(config, key, value);
  config.validate();
  return config;
}

std::string resolve_out_dir(const CliOptions& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv("CHAMBER_OUT")) return env;
  return ".";
}

std::string write_manifest(const SimConfig& config, const std::string& sub,
                           const std::string& out_dir,
                           const std::vector<std::string>& files) {
  fs::create_directories(out_dir);
  RunManifest manifest;
  manifest.version = kToolkitVersion;
  manifest.subcommand = sub;
  manifest.seed = config.seed;
  manifest.out_dir = out_dir;
  manifest.files = files;
  manifest.config_json = config_snapshot(config);
  const std::string path = out_dir + "/" + sub + "_manifest.json";
  std::ofstream out(path);
  out << manifest.to_json();
  return path;
}

struct Pieces {
  GridPtr grid;
  PacketPtr packet;
  DenseOperator h1;  // single-particle Hamiltonian
};

Pieces build_pieces(const SimConfig& c) {
  Pieces p;
  p.grid = build_grid(c.n_sites, c.spacing, c.boundary);
  const double boost = c.packet == "boosted" ? c.boost : 0.0;
  p.packet = gaussian_packet(c.half_width, c.step, boost, c.hbar);
  std::vector<double> pot(c.n_sites, 0.0);
  for (int j = 0; j < c.n_sites; ++j) {
    const double x = p.grid->positions[j];
    pot[j] = 0.5 * c.mass * c.omega * c.omega * x * x;
  }
  p.h1 = hamiltonian(*p.grid, c.mass, pot, nullptr, 1, c.hbar);
  return p;
}

int run_povm_check(const SimConfig& config, const std::string& out_dir) {
  write_manifest(config, "povm-check", out_dir, {});
  auto p = build_pieces(config);
  ReductionKernel kernel(p.packet, position_operator(*p.grid), config.kappa);
  const double residual = povm_residual(kernel);
  std::cout << "povm residual = " << fmt12(residual)
            << " (threshold 1e-08)\n";
  return residual <= 1e-8 ? 0 : 2;
}

int run_kick(const SimConfig& config, const std::string& out_dir) {
  const std::vector<std::string> files = {"kick_outcomes.ndjson",
                                          "kick_density.csv"};
  write_manifest(config, "kick", out_dir, files);
  auto p = build_pieces(config);
  ReductionKernel kernel(p.packet, position_operator(*p.grid), config.kappa);
  auto eta = initial_state(config, p.grid);

  const Eigen::VectorXd density = output_density(kernel, eta);
  CsvWriter csv(out_dir + "/kick_density.csv", {"y", "p"});
  for (int i = 0; i < density.size(); ++i)
    csv.row({p.packet->grid().points[i], density[i]});

  NdjsonWriter nd(out_dir + "/kick_outcomes.ndjson");
  RngStream rng(config.seed, 0);
  const double h = p.packet->grid().step;
  for (long i = 0; i < config.trajectories; ++i) {
    const int idx = sample_index_from_density(density, h, rng);
    auto outcome =
        posterior_state(kernel, eta, p.packet->grid().points[idx]);
    nd.line()
        .field("kind", std::string("outcome"))
        .field("y", outcome.y)
        .field("likelihood", outcome.likelihood)
        .field("prior_norm", outcome.prior_norm)
        .field("posterior_mean_x", outcome.posterior.mean_position())
        .done();
  }
  return 0;
}

int run_trajectory_cmd(const SimConfig& config, const std::string& out_dir) {
  const std::vector<std::string> files = {"trajectory_events.ndjson"};
  write_manifest(config, "trajectory", out_dir, files);
  auto p = build_pieces(config);
  UnitaryPropagator prop(p.h1, config.hbar);
  ReductionKernel kernel(p.packet, position_operator(*p.grid), config.kappa);
  auto eta = initial_state(config, p.grid);

  auto record = run_trajectory(config, prop, kernel, eta, 0);
  NdjsonWriter nd(out_dir + "/trajectory_events.ndjson");
  std::size_t ei = 0, si = 0;
  while (ei < record.events.size() || si < record.snapshots.size()) {
    const bool take_event =
        ei < record.events.size() &&
        (si >= record.snapshots.size() ||
         record.events[ei].t < record.snapshots[si].t);
    if (take_event) {
      nd.line()
          .field("kind", std::string("event"))
          .field("t", record.events[ei].t)
          .field("y", record.events[ei].y)
          .done();
      ++ei;
    } else {
      const auto& snap = record.snapshots[si];
      nd.line()
          .field("kind", std::string("snapshot"))
          .field("t", snap.t)
          .field("norm2", snap.weight)
          .field("mean_x", snap.state.mean_position() /
                               (config.mode == EvolutionMode::linear
                                    ? snap.state.norm2()
                                    : 1.0))
          .field("var_x", snap.state.normalized().position_variance())
          .done();
      ++si;
    }
  }
  return 0;
}

int run_ensemble(const SimConfig& config, const std::string& out_dir) {
  const std::vector<std::string> files = {"ensemble_summary.csv"};
  write_manifest(config, "ensemble", out_dir, files);
  auto p = build_pieces(config);
  UnitaryPropagator prop(p.h1, config.hbar);
  ReductionKernel kernel(p.packet, position_operator(*p.grid), config.kappa);
  auto eta = initial_state(config, p.grid);

  auto stats = run_jump_ensemble(config, prop, kernel, eta);
  CsvWriter csv(out_dir + "/ensemble_summary.csv",
                {"t", "mean_x", "sem_x", "mean_norm2", "sem_norm2"});
  for (std::size_t k = 0; k < stats.times.size(); ++k)
    csv.row({stats.times[k], stats.mean_x[k], stats.sem_x[k],
             stats.mean_norm2[k], stats.sem_norm2[k]});
  return 0;
}

int run_mixing(const SimConfig& config, const std::string& out_dir) {
  const std::vector<std::string> files = {"mixing_events.ndjson",
                                          "mixing_entropy.csv"};
  write_manifest(config, "mixing", out_dir, files);
  auto p = build_pieces(config);
  const int m = config.particles;
  std::vector<double> pot(config.n_sites, 0.0);
  for (int j = 0; j < config.n_sites; ++j) {
    const double x = p.grid->positions[j];
    pot[j] = 0.5 * config.mass * config.omega * config.omega * x * x;
  }
  auto hm = hamiltonian(*p.grid, config.mass, pot, nullptr, m, config.hbar);
  UnitaryPropagator prop(hm, config.hbar);
  ReductionKernel kernel(p.packet, position_operator(*p.grid), config.kappa);
  auto rho0 = pure_density(tensor_power(initial_state(config, p.grid), m));

  auto record = run_density_trajectory(config, prop, kernel, rho0, 0);
  NdjsonWriter nd(out_dir + "/mixing_events.ndjson");
  for (const auto& ev : record.events)
    nd.line()
        .field("kind", std::string("event"))
        .field("t", ev.t)
        .field("y", ev.y)
        .done();
  CsvWriter csv(out_dir + "/mixing_entropy.csv",
                {"t", "entropy", "trace_weight"});
  for (const auto& snap : record.snapshots)
    csv.row({snap.t, von_neumann_entropy(snap.state.normalized()),
             snap.state.trace_weight()});
  return 0;
}

int run_limits(const SimConfig& config, const CliOptions& opt,
               const std::string& out_dir) {
  auto p = build_pieces(config);
  const DenseOperator r = position_operator(*p.grid);

  if (opt.action == "mean-field") {
    write_manifest(config, "limits", out_dir, {"limits_mean_field.csv"});
    const Eigen::MatrixXcd rho0 =
        pure_density(initial_state(config, p.grid)).entries;
    UnitaryPropagator mf(
        mean_field_hamiltonian(p.h1, r, config.gamma, p.packet->p0()),
        config.hbar);
    const Eigen::MatrixXcd u = mf.matrix(config.horizon);
    const Eigen::MatrixXcd target = u * rho0 * u.adjoint();
    CsvWriter csv(out_dir + "/limits_mean_field.csv", {"nu", "distance"});
    std::vector<double> distances;
    for (double nu : {50.0, 100.0, 200.0}) {
      const double kappa = -config.gamma / nu;
      ReductionKernel kernel(p.packet, r, kappa);
      auto rhs = [&](double, const Eigen::MatrixXcd& rho) {
        return jump_master_rhs(rho, p.h1, kernel, nu, 1, config.hbar);
      };
      const Eigen::MatrixXcd evolved =
          ode_integrate(rhs, rho0, config.horizon, config.dt);
      const double d = trace_distance(evolved, target);
      distances.push_back(d);
      csv.row({nu, d});
    }
    std::cout << "ratio(50/100) = " << fmt12(distances[0] / distances[1])
              << ", ratio(100/200) = " << fmt12(distances[1] / distances[2])
              << "\n";
    return 0;
  }

  if (opt.action == "central-limit") {
    write_manifest(config, "limits", out_dir, {"limits_central_limit.csv"});
    auto report = jump_generator_vs_diffusive(
        {100.0, 400.0, 1000.0, 2500.0, 10000.0}, config.gamma, p.h1, r,
        p.packet, config.hbar);
    CsvWriter csv(out_dir + "/limits_central_limit.csv",
                  {"nu", "error", "fitted_exponent"});
    for (std::size_t i = 0; i < report.nus.size(); ++i)
      csv.row({report.nus[i], report.errors[i], report.fitted_exponent});
    std::cout << "fitted exponent = " << fmt12(report.fitted_exponent) << "\n";
    return 0;
  }

  if (opt.action == "diffusive-sse") {
    write_manifest(config, "limits", out_dir,
                   {"limits_sse_path.ndjson", "limits_sse_norm.csv"});
    auto params = make_diffusion_params(p.h1, r, config.gamma, *p.packet,
                                        NoiseKind::complex_v, config.dt);
    const int steps = static_cast<int>(config.horizon / config.dt);
    const auto sample_times = config.sample_times();
    const double a = p.grid->spacing;

    NdjsonWriter nd(out_dir + "/limits_sse_path.ndjson");
    std::vector<double> sum(sample_times.size(), 0.0),
        sum2(sample_times.size(), 0.0);
    for (long traj = 0; traj < config.trajectories; ++traj) {
      RngStream rng(config.seed, traj);
      auto noise = wiener_increments(*p.packet, NoiseKind::complex_v,
                                     config.dt, steps, rng);
      WaveFunction chi = initial_state(config, p.grid);
      std::size_t si = 0;
      for (int i = 0; i <= steps; ++i) {
        const double t = i * config.dt;
        while (si < sample_times.size() && sample_times[si] <= t + 1e-12) {
          const double n2 = chi.amplitudes.squaredNorm() * a;
          sum[si] += n2;
          sum2[si] += n2 * n2;
          if (traj == 0)
            nd.line()
                .field("t", sample_times[si])
                .field("norm2", n2)
                .field("mean_x", chi.mean_position() / n2)
                .done();
          ++si;
        }
        if (i < steps)
          chi.amplitudes = diffusive_sse_step(chi.amplitudes, params, noise.dv[i]);
      }
    }
    CsvWriter csv(out_dir + "/limits_sse_norm.csv",
                  {"t", "mean_norm2", "sem_norm2"});
    const double n = static_cast<double>(config.trajectories);
    for (std::size_t k = 0; k < sample_times.size(); ++k) {
      const double mean = sum[k] / n;
      csv.row({sample_times[k], mean,
               std::sqrt(std::max(0.0, sum2[k] / n - mean * mean) / n)});
    }
    return 0;
  }

  if (opt.action == "diffusive-density") {
    write_manifest(config, "limits", out_dir,
                   {"limits_density_path.csv", "limits_density_path.ndjson"});
    const int m = config.particles;
    auto hm = hamiltonian(*p.grid, config.mass,
                          std::vector<double>(config.n_sites, 0.0), nullptr, m,
                          config.hbar);
    auto params = make_diffusion_params(hm, r, config.gamma, *p.packet,
                                        NoiseKind::complex_v, config.dt, m);
    const int steps = static_cast<int>(config.horizon / config.dt);
    RngStream rng(config.seed, 0);
    auto noise = wiener_increments(*p.packet, NoiseKind::complex_v, config.dt,
                                   steps, rng, static_cast<double>(m));
    DensityMatrix rho = pure_density(tensor_power(initial_state(config, p.grid), m));
    const auto sample_times = config.sample_times();
    // the Euler-Maruyama path can dip marginally below positivity; the
    // entropy diagnostic is taken on the positive part
    auto clamped_entropy = [](const DensityMatrix& state) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(state.entries);
      double total = 0.0;
      for (long i = 0; i < es.eigenvalues().size(); ++i)
        total += std::max(0.0, es.eigenvalues()[i]);
      double entropy = 0.0;
      for (long i = 0; i < es.eigenvalues().size(); ++i) {
        const double lambda = std::max(0.0, es.eigenvalues()[i]) / total;
        if (lambda > 0.0) entropy -= lambda * std::log(lambda);
      }
      return entropy;
    };
    CsvWriter csv(out_dir + "/limits_density_path.csv",
                  {"t", "trace", "entropy"});
    NdjsonWriter nd(out_dir + "/limits_density_path.ndjson");
    std::size_t si = 0;
    for (int i = 0; i <= steps; ++i) {
      const double t = i * config.dt;
      while (si < sample_times.size() && sample_times[si] <= t + 1e-12) {
        const double entropy = clamped_entropy(rho);
        csv.row({sample_times[si], rho.trace_weight(), entropy});
        nd.line()
            .field("t", sample_times[si])
            .field("trace", rho.trace_weight())
            .field("entropy", entropy)
            .done();
        ++si;
      }
      if (i < steps)
        rho.entries = diffusive_density_step(rho.entries, params, noise.dv[i]);
    }
    return 0;
  }

  throw std::invalid_argument(
      "action must be one of mean-field|central-limit|diffusive-sse|diffusive-density");
}

int run_verify(const SimConfig& config, const CliOptions& opt,
               const std::string& out_dir) {
  auto p = build_pieces(config);
  const DenseOperator r = position_operator(*p.grid);
  write_manifest(config, "verify", out_dir, {"verify_report.csv"});

  if (opt.pairing == "jump-vs-oracle" || opt.pairing == "diffusive-vs-oracle") {
    UnitaryPropagator prop(p.h1, config.hbar);
    ReductionKernel kernel(p.packet, r, config.kappa);
    auto eta = initial_state(config, p.grid);
    const Eigen::MatrixXcd rho0 = pure_density(eta).entries;
    const auto times = config.sample_times();

    OracleReport report;
    report.tolerance = opt.tolerance;
    report.times = times;

    if (opt.pairing == "jump-vs-oracle") {
      auto stats = run_jump_ensemble(config, prop, kernel, eta);
      auto rhs = [&](double, const Eigen::MatrixXcd& rho) {
        return jump_master_rhs(rho, p.h1, kernel, config.nu, 1, config.hbar);
      };
      for (std::size_t k = 0; k < times.size(); ++k) {
        const Eigen::MatrixXcd oracle =
            ode_integrate(rhs, rho0, times[k], config.dt);
        Eigen::MatrixXcd mean = stats.mean_state[k];
        mean /= mean.trace().real();
        report.distance.push_back(trace_distance(mean, oracle));
        report.sem.push_back(stats.sem_state[k].maxCoeff());
      }
    } else {
      auto params = make_diffusion_params(p.h1, r, config.gamma, *p.packet,
                                          NoiseKind::complex_v, config.dt);
      const int steps = static_cast<int>(config.horizon / config.dt);
      const double a = p.grid->spacing;
      std::vector<Eigen::MatrixXcd> sums(
          times.size(), Eigen::MatrixXcd::Zero(config.n_sites, config.n_sites));
      for (long traj = 0; traj < config.trajectories; ++traj) {
        RngStream rng(config.seed, traj);
        auto noise = wiener_increments(*p.packet, NoiseKind::complex_v,
                                       config.dt, steps, rng);
        Eigen::VectorXcd chi = eta.amplitudes;
        std::size_t si = 0;
        for (int i = 0; i <= steps; ++i) {
          const double t = i * config.dt;
          while (si < times.size() && times[si] <= t + 1e-12) {
            sums[si] += a * chi * chi.adjoint();
            ++si;
          }
          if (i < steps) chi = diffusive_sse_step(chi, params, noise.dv[i]);
        }
      }
      auto rhs = [&](double, const Eigen::MatrixXcd& rho) {
        return diffusive_master_rhs(rho, p.h1, r, config.gamma,
                                    p.packet->sigma2(), 1, config.hbar);
      };
      for (std::size_t k = 0; k < times.size(); ++k) {
        const Eigen::MatrixXcd oracle =
            ode_integrate(rhs, rho0, times[k], config.dt);
        Eigen::MatrixXcd mean = sums[k] / static_cast<double>(config.trajectories);
        mean /= mean.trace().real();
        report.distance.push_back(trace_distance(mean, oracle));
        report.sem.push_back(0.0);
      }
    }

    CsvWriter csv(out_dir + "/verify_report.csv",
                  {"t", "trace_distance", "sem", "pass"});
    for (std::size_t k = 0; k < report.times.size(); ++k)
      csv.row({report.times[k], report.distance[k], report.sem[k],
               report.distance[k] <= report.tolerance ? 1.0 : 0.0});
    const bool ok = report.all_pass();
    std::cout << (ok ? "verify: PASS" : "verify: FAIL")
              << " (max distance = "
              << fmt12(*std::max_element(report.distance.begin(),
                                         report.distance.end()))
              << ", tolerance = " << fmt12(report.tolerance) << ")\n";
    return ok ? 0 : 2;
  }

  if (opt.pairing == "oracle-vs-oracle") {
    auto report = jump_generator_vs_diffusive(
        {100.0, 400.0, 1000.0, 2500.0, 10000.0}, config.gamma, p.h1, r,
        p.packet, config.hbar);
    CsvWriter csv(out_dir + "/verify_report.csv",
                  {"nu", "error", "fitted_exponent"});
    bool decreasing = true;
    for (std::size_t i = 0; i < report.nus.size(); ++i) {
      csv.row({report.nus[i], report.errors[i], report.fitted_exponent});
      if (i > 0 && !(report.errors[i] < report.errors[i - 1])) decreasing = false;
    }
    const bool ok = decreasing && report.fitted_exponent > 0.0;
    std::cout << (ok ? "verify: PASS" : "verify: FAIL")
              << " (fitted exponent = " << fmt12(report.fitted_exponent)
              << ")\n";
    return ok ? 0 : 2;
  }

  throw std::invalid_argument(
      "pairing must be one of jump-vs-oracle|diffusive-vs-oracle|oracle-vs-oracle");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cloud-chamber trajectory simulator"};
  app.require_subcommand(1);

  CliOptions opt;
  std::map<std::string, std::string> flag_values;
  const std::vector<std::string> override_keys = {
      "n_sites", "spacing", "boundary", "half_width", "step",  "packet",
      "boost",   "nu",      "kappa",    "gamma",      "hbar",  "mass",
      "omega",   "dt",      "particles", "horizon",   "seed",  "mode",
      "samples", "threads", "init",     "trajectories"};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "config file (key=value sections)");
    sub->add_option("--out", opt.out_dir, "output directory (default $CHAMBER_OUT or .)");
    for (const auto& key : override_keys)
      sub->add_option("--" + key, flag_values[key], "override " + key);
  };

  CLI::App* kick = app.add_subcommand("kick", "single-kick outcomes and density");
  CLI::App* traj = app.add_subcommand("trajectory", "one jump trajectory");
  CLI::App* ens = app.add_subcommand("ensemble", "jump trajectory ensemble summary");
  CLI::App* mix = app.add_subcommand("mixing", "M-particle density trajectory");
  CLI::App* lim = app.add_subcommand("limits", "large-rate limit checks");
  CLI::App* ver = app.add_subcommand("verify", "ensemble vs oracle cross-check");
  CLI::App* povm = app.add_subcommand("povm-check", "normalization residual");
  for (CLI::App* sub : {kick, traj, ens, mix, lim, ver, povm}) add_common(sub);
  lim->add_option("--action", opt.action,
                  "mean-field|central-limit|diffusive-sse|diffusive-density");
  ver->add_option("--pairing", opt.pairing,
                  "jump-vs-oracle|diffusive-vs-oracle|oracle-vs-oracle");
  ver->add_option("--tolerance", opt.tolerance, "trace-distance tolerance");

  CLI11_PARSE(app, argc, argv);

  for (const auto& [key, value] : flag_values)
    if (!value.empty()) opt.overrides.emplace_back(key, value);

  try {
    const SimConfig config = resolve_config(opt);
    const std::string out_dir = resolve_out_dir(opt);
    if (app.got_subcommand(kick)) return run_kick(config, out_dir);
    if (app.got_subcommand(traj)) return run_trajectory_cmd(config, out_dir);
    if (app.got_subcommand(ens)) return run_ensemble(config, out_dir);
    if (app.got_subcommand(mix)) return run_mixing(config, out_dir);
    if (app.got_subcommand(lim)) return run_limits(config, opt, out_dir);
    if (app.got_subcommand(ver)) return run_verify(config, opt, out_dir);
    if (app.got_subcommand(povm)) return run_povm_check(config, out_dir);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 1;
}

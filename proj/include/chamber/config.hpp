#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chamber/lattice.hpp"
#include "chamber/packet.hpp"

namespace chamber {

enum class EvolutionMode { linear, normalized };

std::string to_string(EvolutionMode m);
EvolutionMode mode_from_string(const std::string& s);

/// Resolved run parameters. Sections mirror the config file:
/// [grid], [meter], [dynamics], [run].
struct SimConfig {
  // [grid]
  int n_sites = 16;
  double spacing = 0.25;
  Boundary boundary = Boundary::dirichlet;

  // [meter]
  double half_width = 8.0;
  double step = 1.0 / 256.0;
  std::string packet = "gaussian";  // gaussian | boosted
  double boost = 0.0;

  // [dynamics]
  double nu = 2.0;
  double kappa = 0.3;
  double gamma = 1.0;
  double hbar = 1.0;
  double mass = 1.0;
  double omega = 0.0;  // harmonic potential strength, 0 = free
  double dt = 1e-3;    // integrator step for the diffusive actions
  int particles = 1;

  // [run]
  double horizon = 1.0;
  long trajectories = 10000;
  std::uint64_t seed = 20120;
  EvolutionMode mode = EvolutionMode::normalized;
  int samples = 11;
  int threads = 1;
  std::string init = "bump";  // bump | site:<j> | pair:<i>:<j>

  std::vector<double> sample_times() const;
  void validate() const;
};

/// Parses the line-oriented key=value format with [section] headers.
/// Unknown sections or keys are rejected.
SimConfig parse_config(const std::string& text);

/// Applies one "section.key" (or unambiguous bare "key") override.
void apply_override(SimConfig& config, const std::string& key,
                    const std::string& value);

std::string config_snapshot(const SimConfig& config);

}  // namespace chamber

#include "chamber/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "chamber/common.hpp"
#include "chamber/output.hpp"

namespace chamber {

std::string to_string(EvolutionMode m) {
  return m == EvolutionMode::linear ? "linear" : "normalized";
}

EvolutionMode mode_from_string(const std::string& s) {
  if (s == "linear") return EvolutionMode::linear;
  if (s == "normalized") return EvolutionMode::normalized;
  throw std::invalid_argument("mode must be 'linear' or 'normalized', got '" + s + "'");
}

std::vector<double> SimConfig::sample_times() const {
  std::vector<double> times;
  if (samples <= 1) {
    times.push_back(horizon);
    return times;
  }
  for (int i = 0; i < samples; ++i)
    times.push_back(horizon * static_cast<double>(i) / (samples - 1));
  return times;
}

void SimConfig::validate() const {
  if (n_sites < 2) throw std::invalid_argument("n_sites >= 2 violated");
  if (!(spacing > 0.0)) throw std::invalid_argument("spacing > 0 violated");
  if (!(half_width >= 6.0)) throw std::invalid_argument("half_width >= 6 violated");
  if (!(step > 0.0 && step <= 1.0 / 64.0))
    throw std::invalid_argument("step <= 1/64 violated");
  if (packet != "gaussian" && packet != "boosted")
    throw std::invalid_argument("packet must be 'gaussian' or 'boosted'");
  if (!(nu > 0.0))
    throw std::invalid_argument("nu > 0 violated (nu = " + fmt12(nu) + ")");
  if (!(hbar > 0.0)) throw std::invalid_argument("hbar > 0 violated");
  if (!(mass > 0.0)) throw std::invalid_argument("mass > 0 violated");
  if (!(dt > 0.0)) throw std::invalid_argument("dt > 0 violated");
  if (particles < 1) throw std::invalid_argument("particles >= 1 violated");
  tensor_dim(n_sites, particles);
  if (!(horizon >= 0.0)) throw std::invalid_argument("horizon >= 0 violated");
  if (trajectories < 1) throw std::invalid_argument("trajectories >= 1 violated");
  if (samples < 1) throw std::invalid_argument("samples >= 1 violated");
  if (threads < 1) throw std::invalid_argument("threads >= 1 violated");
  const bool site = init.rfind("site:", 0) == 0;
  const bool pair = init.rfind("pair:", 0) == 0;
  if (init != "bump" && !site && !pair)
    throw std::invalid_argument("init must be 'bump', 'site:<j>' or 'pair:<i>:<j>'");
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("value for '" + key + "' is not a number: '" + v + "'");
  }
  if (pos != v.size())
    throw std::invalid_argument("value for '" + key + "' is not a number: '" + v + "'");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d))
    throw std::invalid_argument("value for '" + key + "' must be an integer");
  return static_cast<long>(d);
}

void set_key(SimConfig& c, const std::string& section, const std::string& key,
             const std::string& value) {
  auto in = [&](const char* s) { return section == s || section.empty(); };
  if (key == "n_sites" && in("grid")) c.n_sites = static_cast<int>(to_long(key, value));
  else if (key == "spacing" && in("grid")) c.spacing = to_double(key, value);
  else if (key == "boundary" && in("grid")) c.boundary = boundary_from_string(value);
  else if (key == "half_width" && in("meter")) c.half_width = to_double(key, value);
  else if (key == "step" && in("meter")) c.step = to_double(key, value);
  else if (key == "packet" && in("meter")) c.packet = value;
  else if (key == "boost" && in("meter")) c.boost = to_double(key, value);
  else if (key == "nu" && in("dynamics")) c.nu = to_double(key, value);
  else if (key == "kappa" && in("dynamics")) c.kappa = to_double(key, value);
  else if (key == "gamma" && in("dynamics")) c.gamma = to_double(key, value);
  else if (key == "hbar" && in("dynamics")) c.hbar = to_double(key, value);
  else if (key == "mass" && in("dynamics")) c.mass = to_double(key, value);
  else if (key == "omega" && in("dynamics")) c.omega = to_double(key, value);
  else if (key == "dt" && in("dynamics")) c.dt = to_double(key, value);
  else if (key == "particles" && in("dynamics")) c.particles = static_cast<int>(to_long(key, value));
  else if (key == "horizon" && in("run")) c.horizon = to_double(key, value);
  else if (key == "trajectories" && in("run")) c.trajectories = to_long(key, value);
  else if (key == "seed" && in("run")) c.seed = static_cast<std::uint64_t>(to_long(key, value));
  else if (key == "mode" && in("run")) c.mode = mode_from_string(value);
  else if (key == "samples" && in("run")) c.samples = static_cast<int>(to_long(key, value));
  else if (key == "threads" && in("run")) c.threads = static_cast<int>(to_long(key, value));
  else if (key == "init" && in("run")) c.init = value;
  else
    throw std::invalid_argument("unknown key '" + key + "'" +
                                (section.empty() ? "" : " in [" + section + "]"));
}

}  // namespace

SimConfig parse_config(const std::string& text) {
  SimConfig config;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("malformed section header at line " +
                                    std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (section != "grid" && section != "meter" && section != "dynamics" &&
          section != "run")
        throw std::invalid_argument("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key=value at line " +
                                  std::to_string(lineno));
    if (section.empty())
      throw std::invalid_argument("key outside of any [section] at line " +
                                  std::to_string(lineno));
    set_key(config, section, trim(line.substr(0, eq)),
            trim(line.substr(eq + 1)));
  }
  return config;
}

void apply_override(SimConfig& config, const std::string& key,
                    const std::string& value) {
  set_key(config, "", key, value);
}

std::string config_snapshot(const SimConfig& c) {
  std::ostringstream out;
  out << "{";
  out << "\"n_sites\":" << c.n_sites;
  out << ",\"spacing\":" << fmt12(c.spacing);
  out << ",\"boundary\":\"" << to_string(c.boundary) << "\"";
  out << ",\"half_width\":" << fmt12(c.half_width);
  out << ",\"step\":" << fmt12(c.step);
  out << ",\"packet\":\"" << c.packet << "\"";
  out << ",\"boost\":" << fmt12(c.boost);
  out << ",\"nu\":" << fmt12(c.nu);
  out << ",\"kappa\":" << fmt12(c.kappa);
  out << ",\"gamma\":" << fmt12(c.gamma);
  out << ",\"hbar\":" << fmt12(c.hbar);
  out << ",\"mass\":" << fmt12(c.mass);
  out << ",\"omega\":" << fmt12(c.omega);
  out << ",\"dt\":" << fmt12(c.dt);
  out << ",\"particles\":" << c.particles;
  out << ",\"horizon\":" << fmt12(c.horizon);
  out << ",\"trajectories\":" << c.trajectories;
  out << ",\"seed\":" << c.seed;
  out << ",\"mode\":\"" << to_string(c.mode) << "\"";
  out << ",\"samples\":" << c.samples;
  out << ",\"threads\":" << c.threads;
  out << ",\"init\":\"" << c.init << "\"";
  out << "}";
  return out.str();
}

}  // namespace chamber

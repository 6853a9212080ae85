#include "chamber/kick.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <unsupported/Eigen/KroneckerProduct>

namespace chamber {

KickOutcome posterior_state(const ReductionKernel& kernel,
                            const WaveFunction& eta, double y) {
  if (std::abs(eta.norm2() - 1.0) > 1e-8)
    throw std::invalid_argument("state must be normalized within 1e-8");
  const int idx = kernel.packet().grid().index_of(y);
  const Eigen::VectorXcd g = kernel.factors(idx);

  WaveFunction reduced = eta;
  reduced.amplitudes = g.cwiseProduct(eta.amplitudes);
  const double prior_norm = reduced.norm2();
  if (prior_norm <= 1e-300)
    throw std::runtime_error("zero-likelihood outcome: G(y) eta vanishes");
  const double likelihood = prior_norm * kernel.packet().density()[idx];
  return KickOutcome{y, reduced.normalized(), likelihood, prior_norm};
}

Eigen::VectorXd pointer_statistics(const ReductionKernel& kernel,
                                   const WaveFunction& eta) {
  return output_density(kernel, eta);
}

SharpStats sharp_projection_stats(const LatticeGrid& grid, double kappa,
                                  const WaveFunction& eta) {
  if (eta.particle_count != 1)
    throw std::invalid_argument("sharp statistics expect a single particle");
  if (!(kappa > 0.0))
    throw std::invalid_argument("cell width kappa must be positive");
  const double ratio = kappa / grid.spacing;
  const long c = std::lround(ratio);
  if (c < 1 || std::abs(ratio - static_cast<double>(c)) > 1e-9)
    throw std::invalid_argument(
        "cell width kappa must be an integer multiple of the grid spacing");

  std::map<long, double> cells;
  for (int j = 0; j < grid.n_sites; ++j) {
    const long idx = j - grid.n_sites / 2;  // x_j / spacing
    const long m = idx >= 0 ? idx / c : -((-idx + c - 1) / c);
    cells[m] += std::norm(eta.amplitudes[j]) * grid.spacing;
  }
  SharpStats stats;
  for (const auto& [m, p] : cells) {
    stats.cell_positions.push_back(kappa * static_cast<double>(m));
    stats.probabilities.push_back(p);
  }
  return stats;
}

WaveFunction single_kick_evolve(const UnitaryPropagator& prop,
                                const ReductionKernel& kernel,
                                const WaveFunction& eta, double t0, double t,
                                double y) {
  if (!(t0 <= 0.0))
    throw std::invalid_argument("t0 <= 0 violated");
  if (t < t0) throw std::invalid_argument("t >= t0 violated");
  if (t <= 0.0) return prop.evolve(eta, t - t0);

  WaveFunction state = prop.evolve(eta, -t0);
  const int idx = kernel.packet().grid().index_of(y);
  state.amplitudes = kernel.factors(idx).cwiseProduct(state.amplitudes);
  return prop.evolve(state, t);
}

namespace {

// Unitary DFT and the wrapped meter momentum values p_k = 2 pi hbar s(k)/(n h)
// with s(k) in [-n/2, n/2).
Eigen::MatrixXcd dft_matrix(int n) {
  Eigen::MatrixXcd f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      f(k, i) = scale * std::exp(cplx(0.0, -2.0 * kPi * k * i / n));
  return f;
}

Eigen::VectorXd momentum_values(int n, double step, double hbar) {
  Eigen::VectorXd p(n);
  for (int k = 0; k < n; ++k) {
    const int s = k < n / 2 ? k : k - n;
    p[k] = 2.0 * kPi * hbar * s / (n * step);
  }
  return p;
}

}  // namespace

JointModelReport joint_model_check(const GridPtr& grid, const DenseOperator& h,
                                   double kappa, int meter_points,
                                   double meter_halfwidth, double hbar,
                                   bool with_commutator) {
  const int n = grid->n_sites;
  const int nm = meter_points;
  const long joint_dim = static_cast<long>(n) * nm;
  if (joint_dim > kDimCap)
    throw std::length_error("capacity: joint dimension " +
                            std::to_string(joint_dim) + " exceeds " +
                            std::to_string(kDimCap));

  // Periodic meter grid over [-Y, Y), discretely normalized gaussian packet.
  const double hm = 2.0 * meter_halfwidth / nm;
  Eigen::VectorXd ym(nm);
  for (int i = 0; i < nm; ++i) ym[i] = -meter_halfwidth + i * hm;
  Eigen::VectorXcd f0(nm);
  for (int i = 0; i < nm; ++i) f0[i] = std::exp(-0.5 * kPi * ym[i] * ym[i]);
  const double c = 1.0 / std::sqrt(f0.squaredNorm() * hm);
  f0 *= c;

  const Eigen::MatrixXcd dft = dft_matrix(nm);
  const Eigen::VectorXd pvals = momentum_values(nm, hm, hbar);

  // Per-site meter translations by kappa * x_j.
  std::vector<Eigen::MatrixXcd> shift(n);
  for (int j = 0; j < n; ++j) {
    const double s = kappa * grid->positions[j];
    Eigen::VectorXcd phase(nm);
    for (int k = 0; k < nm; ++k)
      phase[k] = std::exp(cplx(0.0, -pvals[k] * s / hbar));
    shift[j] = dft.adjoint() * phase.asDiagonal() * dft;
  }

  JointModelReport report{static_cast<int>(joint_dim), 0.0, 0.0, 0.0};

  // (i) the scattering moves the packet by kappa * x_j
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXcd moved = shift[j] * f0;
    for (int i = 0; i < nm; ++i) {
      const double y = ym[i] - kappa * grid->positions[j];
      const cplx expected = c * std::exp(-0.5 * kPi * y * y);
      report.shift_deviation =
          std::max(report.shift_deviation, std::abs(moved[i] - expected));
    }
  }

  // (ii) reduced meter marginal against the kernel's output density
  {
    auto packet = gaussian_packet(meter_halfwidth, 1.0 / 256.0, 0.0, hbar);
    ReductionKernel kernel(packet, position_operator(*grid), kappa);
    WaveFunction eta = site_superposition(grid, {n / 4, (3 * n) / 4});
    const double a = grid->spacing;
    for (int i = 0; i < nm; ++i) {
      double marginal = 0.0;
      for (int j = 0; j < n; ++j) {
        const cplx amp = (shift[j] * f0)[i] * eta.amplitudes[j];
        marginal += std::norm(amp) * a;
      }
      const Eigen::VectorXcd g = kernel.factors_at(ym[i]);
      const double f0y = std::norm(packet->value_at(ym[i]));
      double reference = 0.0;
      for (int j = 0; j < n; ++j)
        reference += std::norm(g[j]) * f0y * std::norm(eta.amplitudes[j]) * a;
      report.marginal_deviation =
          std::max(report.marginal_deviation, std::abs(marginal - reference));
    }
  }

  // (iii) readouts commute with later system observables
  if (with_commutator) {
    const Eigen::MatrixXcd eye_m = Eigen::MatrixXcd::Identity(nm, nm);
    Eigen::MatrixXcd s_joint = Eigen::MatrixXcd::Zero(joint_dim, joint_dim);
    for (int j = 0; j < n; ++j)
      s_joint.block(j * nm, j * nm, nm, nm) = shift[j];

    UnitaryPropagator prop(h, hbar);
    const double t0 = -0.4;
    auto u0 = [&](double t) {
      return Eigen::MatrixXcd(
          Eigen::kroneckerProduct(prop.matrix(t), eye_m));
    };
    auto u1 = [&](double t) {
      if (t <= 0.0) return u0(t - t0);
      // U0(t - t0) S(-t0) with S(r) = U0^dag(r) S U0(r)
      return Eigen::MatrixXcd(u0(t - t0) * u0(-t0).adjoint() * s_joint *
                              u0(-t0));
    };

    Eigen::VectorXcd qdiag(joint_dim);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < nm; ++i) qdiag[j * nm + i] = ym[i] / (kappa == 0.0 ? 1.0 : kappa);
    Eigen::MatrixXcd q = qdiag.asDiagonal();

    std::mt19937_64 gen(314159);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXcd x(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) x(i, j) = cplx(dist(gen), dist(gen));
    x = 0.5 * (x + x.adjoint()).eval();
    const Eigen::MatrixXcd x_joint = Eigen::kroneckerProduct(x, eye_m);

    for (auto [s, t] : {std::pair{0.7, 0.3}, std::pair{0.5, 0.5}}) {
      const Eigen::MatrixXcd us = u1(s);
      const Eigen::MatrixXcd ut = u1(t);
      const Eigen::MatrixXcd xs = us.adjoint() * x_joint * us;
      const Eigen::MatrixXcd yt = ut.adjoint() * q * ut;
      const double norm = (xs * yt - yt * xs).cwiseAbs().maxCoeff();
      report.commutator_norm = std::max(report.commutator_norm, norm);
    }
  }

  return report;
}

}  // namespace chamber

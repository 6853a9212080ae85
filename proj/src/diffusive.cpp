#include "chamber/diffusive.hpp"

#include <cmath>
#include <stdexcept>

namespace chamber {

namespace {

inline int digit(long a, int k, int n, int m) {
  long div = 1;
  for (int j = 0; j < m - k; ++j) div *= n;
  return static_cast<int>((a / div) % n);
}

Eigen::VectorXd real_diagonal(const DenseOperator& r) {
  Eigen::VectorXd d(r.dim());
  for (int i = 0; i < r.dim(); ++i) d[i] = r.entries(i, i).real();
  return d;
}

void require_kind(const DiffusionParams& params, NoiseKind kind) {
  // real du and complex dv never drive the same equation
  if (params.kind != kind)
    throw std::invalid_argument("integrator step called with the wrong noise kind");
}

}  // namespace

double DiffusionParams::hermitian_part_defect() const {
  Eigen::MatrixXcd herm = 0.5 * (k_op + k_op.adjoint());
  const double c = 0.5 * (gamma / hbar) * (gamma / hbar) * sigma2;
  for (long a = 0; a < herm.rows(); ++a) herm(a, a) -= c * site_sq[a];
  return herm.cwiseAbs().maxCoeff();
}

DiffusionParams make_diffusion_params(const DenseOperator& h,
                                      const DenseOperator& r, double gamma,
                                      const PointerPacket& packet,
                                      NoiseKind kind, double dt,
                                      int particle_count) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt > 0 violated");
  const int n = r.dim();
  const long dim = tensor_dim(n, particle_count);
  if (h.dim() != dim)
    throw std::invalid_argument("Hamiltonian dimension does not match R^M");

  DiffusionParams p;
  p.gamma = gamma;
  p.sigma2 = packet.sigma2();
  p.p0 = packet.p0();
  p.hbar = packet.hbar();
  p.dt = dt;
  p.kind = kind;
  p.particle_count = particle_count;
  p.h_op = h.entries;
  p.noise_sym = packet.lprime_second_moment();
  p.noise_abs = packet.lprime_abs_moment();

  const Eigen::VectorXd x = real_diagonal(r);
  p.site_mean.resize(dim);
  p.site_sq.resize(dim);
  p.quad.resize(dim, dim);
  std::vector<double> sums(dim, 0.0);
  for (long a = 0; a < dim; ++a) {
    double s = 0.0, s2 = 0.0;
    for (int k = 1; k <= particle_count; ++k) {
      const double xa = x[digit(a, k, n, particle_count)];
      s += xa;
      s2 += xa * xa;
    }
    p.site_mean[a] = s / particle_count;
    p.site_sq[a] = s2;
  }
  for (long a = 0; a < dim; ++a)
    for (long b = 0; b < dim; ++b) {
      double q = 0.0;
      for (int k = 1; k <= particle_count; ++k)
        q += x[digit(a, k, n, particle_count)] *
             x[digit(b, k, n, particle_count)];
      p.quad(a, b) = q;
    }

  const double c = 0.5 * (gamma / p.hbar) * (gamma / p.hbar) * p.sigma2;
  p.k_op = (cplx(0.0, 1.0) / p.hbar) * p.h_op;
  for (long a = 0; a < dim; ++a) p.k_op(a, a) += c * p.site_sq[a];

  if (p.hermitian_part_defect() > 1e-12)
    throw std::runtime_error("Hermitian part of K deviates from its closed form");
  return p;
}

NoisePath wiener_increments(const PointerPacket& packet, NoiseKind kind,
                            double dt, int steps, RngStream& rng,
                            double covariance_scale) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt > 0 violated");
  NoisePath path;
  path.dt = dt;
  path.kind = kind;
  if (kind == NoiseKind::real_u) {
    const double scale = std::sqrt(packet.sigma2() * dt * covariance_scale);
    path.du.resize(steps);
    for (int i = 0; i < steps; ++i) path.du[i] = scale * rng.normal();
  } else {
    const cplx c1 = packet.lprime_second_moment() * covariance_scale;
    const double c2 = packet.lprime_abs_moment() * covariance_scale;
    // covariance of (Re dv, Im dv):
    //   E[Re^2] = (c2 + Re c1)/2 dt, E[Im^2] = (c2 - Re c1)/2 dt,
    //   E[Re Im] = (Im c1)/2 dt
    const double vrr = 0.5 * (c2 + c1.real()) * dt;
    const double vii = std::max(0.0, 0.5 * (c2 - c1.real()) * dt);
    const double vri = 0.5 * c1.imag() * dt;
    const double alpha = std::sqrt(std::max(0.0, vrr));
    const double beta = alpha > 0.0 ? vri / alpha : 0.0;
    const double delta = std::sqrt(std::max(0.0, vii - beta * beta));
    path.dv.resize(steps);
    for (int i = 0; i < steps; ++i) {
      const double xi1 = rng.normal();
      const double xi2 = rng.normal();
      path.dv[i] = cplx(alpha * xi1, beta * xi1 + delta * xi2);
    }
  }
  return path;
}

DenseOperator mean_field_hamiltonian(const DenseOperator& h,
                                     const DenseOperator& r, double gamma,
                                     double p0) {
  if (h.hermiticity_defect() > 1e-12 || r.hermiticity_defect() > 1e-12)
    throw std::invalid_argument("operator not Hermitian within 1e-12");
  return make_operator(h.entries - gamma * p0 * r.entries, true);
}

Eigen::VectorXcd diffusive_sse_step(const Eigen::VectorXcd& chi,
                                    const DiffusionParams& params, cplx dv) {
  require_kind(params, NoiseKind::complex_v);
  if (params.particle_count != 1)
    throw std::invalid_argument("the linear wave equation is single-particle");
  Eigen::VectorXcd out = chi - params.dt * (params.k_op * chi);
  out.array() += (params.gamma * dv) * params.site_mean.cast<cplx>().array() * chi.array();
  return out;
}

UnitaryStepResult unitary_diffusive_step(const Eigen::VectorXcd& psi,
                                         const DiffusionParams& params,
                                         double du) {
  require_kind(params, NoiseKind::real_u);
  const cplx unit(0.0, 1.0);
  auto drift = [&](const Eigen::VectorXcd& v) {
    return ((-unit / params.hbar) * (params.h_op * v)).eval();
  };
  if (params.particle_count != 1)
    throw std::invalid_argument("the norm-preserving wave equation is single-particle");
  auto diffusion = [&](const Eigen::VectorXcd& v) {
    return Eigen::VectorXcd((unit * params.gamma / params.hbar) *
                            (params.site_mean.cast<cplx>().array() * v.array())
                                .matrix());
  };
  const Eigen::VectorXcd a0 = drift(psi);
  const Eigen::VectorXcd b0 = diffusion(psi);
  const Eigen::VectorXcd predictor = psi + params.dt * a0 + du * b0;
  const Eigen::VectorXcd corrected =
      psi + 0.5 * params.dt * (a0 + drift(predictor)) +
      0.5 * du * (b0 + diffusion(predictor));

  const double ratio = corrected.norm() / psi.norm();
  UnitaryStepResult result;
  result.defect = std::abs(ratio - 1.0);
  result.psi = corrected / ratio;
  return result;
}

Eigen::MatrixXcd diffusive_density_step(const Eigen::MatrixXcd& rho,
                                        const DiffusionParams& params, cplx dw,
                                        double* hermiticity_deviation) {
  require_kind(params, NoiseKind::complex_v);
  const double c =
      (params.gamma / params.hbar) * (params.gamma / params.hbar) * params.sigma2;
  Eigen::MatrixXcd out =
      rho - params.dt * (params.k_op * rho + rho * params.k_op.adjoint());
  out += (params.dt * c) * params.quad.cast<cplx>().cwiseProduct(rho);
  // gamma (dw Rbar rho + rho Rbar dw*)
  for (long a = 0; a < rho.rows(); ++a)
    for (long b = 0; b < rho.cols(); ++b)
      out(a, b) += params.gamma *
                   (dw * params.site_mean[a] + std::conj(dw) * params.site_mean[b]) *
                   rho(a, b);
  const Eigen::MatrixXcd sym = 0.5 * (out + out.adjoint());
  if (hermiticity_deviation != nullptr)
    *hermiticity_deviation = (out - sym).cwiseAbs().maxCoeff();
  return sym;
}

ConvergenceReport jump_generator_vs_diffusive(const std::vector<double>& nus,
                                              double gamma,
                                              const DenseOperator& h,
                                              const DenseOperator& r,
                                              PacketPtr packet, double hbar) {
  if (nus.size() < 2)
    throw std::invalid_argument("the rate ladder needs at least two values");
  const int n = r.dim();
  const double sigma2 = packet->sigma2();

  ConvergenceReport report;
  report.nus = nus;
  for (double nu : nus) {
    const double kappa = -gamma / std::sqrt(nu);
    ReductionKernel kernel(packet, r, kappa);
    double err = 0.0;
    Eigen::MatrixXcd unit = Eigen::MatrixXcd::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        unit.setZero();
        unit(a, b) = 1.0;
        const Eigen::MatrixXcd jump =
            jump_master_rhs(unit, h, kernel, nu, 1, hbar);
        const Eigen::MatrixXcd diff =
            diffusive_master_rhs(unit, h, r, gamma, sigma2, 1, hbar);
        err = std::max(err, (jump - diff).cwiseAbs().maxCoeff());
      }
    report.errors.push_back(err);
  }

  // least-squares slope of ln(err) against ln(nu)
  const std::size_t m = nus.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(nus[i]);
    const double y = std::log(std::max(report.errors[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  report.fitted_exponent = -slope;
  return report;
}

}  // namespace chamber

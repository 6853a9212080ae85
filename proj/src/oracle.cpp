#include "chamber/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace chamber {

namespace {

inline int digit(long a, int k, int n, int m) {
  long div = 1;
  for (int j = 0; j < m - k; ++j) div *= n;
  return static_cast<int>((a / div) % n);
}

}  // namespace

Eigen::MatrixXcd jump_master_rhs(const Eigen::MatrixXcd& rho,
                                 const DenseOperator& h,
                                 const ReductionKernel& kernel, double nu,
                                 int particle_count, double hbar) {
  if (rho.rows() != h.dim())
    throw std::invalid_argument("density and Hamiltonian dimensions differ");
  const int n = kernel.n_sites();
  const long dim = rho.rows();
  const Eigen::MatrixXcd& gram = kernel.gram();

  Eigen::MatrixXcd rhs =
      (cplx(0.0, -1.0) / hbar) * (h.entries * rho - rho * h.entries);
  const double rate = nu * particle_count;
  for (long a = 0; a < dim; ++a)
    for (long b = 0; b < dim; ++b) {
      cplx factor{0.0, 0.0};
      for (int k = 1; k <= particle_count; ++k)
        factor += gram(digit(a, k, n, particle_count),
                       digit(b, k, n, particle_count));
      factor /= static_cast<double>(particle_count);
      rhs(a, b) += rate * (factor - 1.0) * rho(a, b);
    }
  return rhs;
}

Eigen::MatrixXcd diffusive_master_rhs(const Eigen::MatrixXcd& rho,
                                      const DenseOperator& h,
                                      const DenseOperator& r, double gamma,
                                      double sigma2, int particle_count,
                                      double hbar) {
  const int n = r.dim();
  const long dim = rho.rows();
  Eigen::MatrixXcd rhs =
      (cplx(0.0, -1.0) / hbar) * (h.entries * rho - rho * h.entries);
  const double c = gamma * gamma * sigma2 / (hbar * hbar);
  for (long a = 0; a < dim; ++a)
    for (long b = 0; b < dim; ++b) {
      double quad = 0.0;
      for (int k = 1; k <= particle_count; ++k) {
        const double xa = r.entries(digit(a, k, n, particle_count),
                                    digit(a, k, n, particle_count))
                              .real();
        const double xb = r.entries(digit(b, k, n, particle_count),
                                    digit(b, k, n, particle_count))
                              .real();
        quad += (xa - xb) * (xa - xb);
      }
      rhs(a, b) += -0.5 * c * quad * rho(a, b);
    }
  return rhs;
}

namespace {

Eigen::MatrixXcd rk4_run(const MasterRhs& rhs, Eigen::MatrixXcd rho,
                         double horizon, double dt) {
  double t = 0.0;
  while (t < horizon - 1e-15) {
    const double step = std::min(dt, horizon - t);
    const Eigen::MatrixXcd k1 = rhs(t, rho);
    const Eigen::MatrixXcd k2 = rhs(t + 0.5 * step, rho + 0.5 * step * k1);
    const Eigen::MatrixXcd k3 = rhs(t + 0.5 * step, rho + 0.5 * step * k2);
    const Eigen::MatrixXcd k4 = rhs(t + step, rho + step * k3);
    rho += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += step;
  }
  return rho;
}

}  // namespace

Eigen::MatrixXcd ode_integrate(const MasterRhs& rhs, Eigen::MatrixXcd rho0,
                               double horizon, double dt,
                               double* error_estimate, double flag_tolerance) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt > 0 violated");
  if (horizon < 0.0) throw std::invalid_argument("horizon >= 0 violated");
  const Eigen::MatrixXcd full = rk4_run(rhs, rho0, horizon, dt);
  if (error_estimate != nullptr ||
      flag_tolerance < std::numeric_limits<double>::infinity()) {
    const Eigen::MatrixXcd half = rk4_run(rhs, rho0, horizon, dt / 2.0);
    const double estimate = (full - half).cwiseAbs().maxCoeff();
    if (error_estimate != nullptr) *error_estimate = estimate;
    if (estimate > flag_tolerance)
      throw std::runtime_error(
          "ode step too large: halving dt changes the result by " +
          std::to_string(estimate));
  }
  return full;
}

EnsembleMoment ensemble_average(const std::vector<Eigen::MatrixXcd>& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("ensemble average requires >= 2 samples");
  const long rows = samples.front().rows(), cols = samples.front().cols();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(rows, cols);
  for (const auto& s : samples) sum += s;
  const double n = static_cast<double>(samples.size());
  EnsembleMoment moment;
  moment.count = static_cast<long>(samples.size());
  moment.mean = sum / n;
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(rows, cols);
  for (const auto& s : samples) var += (s - moment.mean).cwiseAbs2();
  moment.sem = (var / (n * n)).cwiseSqrt();
  return moment;
}

double trace_distance(const Eigen::MatrixXcd& rho1,
                      const Eigen::MatrixXcd& rho2) {
  if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols())
    throw std::invalid_argument("trace distance requires equal dimensions");
  const double t1 = rho1.trace().real(), t2 = rho2.trace().real();
  if (std::abs(t1 - 1.0) > 1e-6 || std::abs(t2 - 1.0) > 1e-6 ||
      std::abs(t1 - t2) > 1e-6)
    throw std::invalid_argument("trace mismatch exceeds 1e-6");
  const Eigen::MatrixXcd diff = rho1 - rho2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (diff + diff.adjoint()));
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

bool OracleReport::all_pass() const {
  for (double d : distance)
    if (!(d <= tolerance)) return false;
  return true;
}

}  // namespace chamber

#include "chamber/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace chamber {

namespace {

Eigen::VectorXd diagonal_of(const DenseOperator& r) {
  const int n = r.dim();
  double offdiag = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) offdiag = std::max(offdiag, std::abs(r.entries(i, j)));
  if (offdiag > 1e-12)
    throw std::invalid_argument("reduction kernel requires a diagonal R");
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) {
    if (std::abs(r.entries(i, i).imag()) > 1e-12)
      throw std::invalid_argument("reduction kernel requires a real diagonal R");
    d[i] = r.entries(i, i).real();
  }
  return d;
}

}  // namespace

ReductionKernel::ReductionKernel(PacketPtr packet, const DenseOperator& r,
                                 double kappa)
    : packet_(std::move(packet)), kappa_(kappa), sites_(diagonal_of(r)) {
  if (!packet_) throw std::invalid_argument("null packet");
  const double max_site = sites_.cwiseAbs().maxCoeff();
  const double bound = packet_->grid().half_width / 2.0;
  if (std::abs(kappa_) * max_site > bound)
    throw std::invalid_argument(
        "|kappa| * max|x| <= half_width/2 violated (" +
        std::to_string(std::abs(kappa_) * max_site) + " > " +
        std::to_string(bound) + ")");

  const int n = static_cast<int>(sites_.size());
  const int ny = packet_->grid().size();
  factors_.resize(n, ny);
  shifted_density_.resize(n, ny);
  for (int i = 0; i < ny; ++i) {
    const Eigen::VectorXcd g = factors_at(packet_->grid().points[i]);
    factors_.col(i) = g;
    for (int j = 0; j < n; ++j)
      shifted_density_(j, i) = std::norm(g[j]) * packet_->density()[i];
  }

  const double h = packet_->grid().step;
  gram_.resize(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b <= a; ++b) {
      cplx acc{0.0, 0.0};
      for (int i = 0; i < ny; ++i)
        acc += factors_(a, i) * std::conj(factors_(b, i)) * packet_->density()[i];
      gram_(a, b) = acc * h;
      gram_(b, a) = std::conj(acc * h);
    }
}

Eigen::VectorXcd ReductionKernel::factors_at(double y) const {
  const int n = static_cast<int>(sites_.size());
  Eigen::VectorXcd g(n);
  if (packet_->kind() == PacketKind::custom) {
    const cplx denom = packet_->value_at(y);
    if (denom == cplx(0.0, 0.0))
      throw std::invalid_argument("custom packet vanishes at the requested reading");
    for (int j = 0; j < n; ++j)
      g[j] = packet_->value_at(y - kappa_ * sites_[j]) / denom;
  } else {
    const double p0 = packet_->boost();
    const double hbar = packet_->hbar();
    for (int j = 0; j < n; ++j) {
      const double x = sites_[j];
      g[j] = std::exp(kPi * kappa_ * x * (y - 0.5 * kappa_ * x)) *
             std::exp(cplx(0.0, -p0 * kappa_ * x / hbar));
    }
  }
  return g;
}

ReductionKernel reduction_kernel(PacketPtr packet, const DenseOperator& r,
                                 double kappa) {
  return ReductionKernel(std::move(packet), r, kappa);
}

double povm_residual(const ReductionKernel& kernel) {
  const double h = kernel.packet().grid().step;
  double residual = 0.0;
  for (int j = 0; j < kernel.n_sites(); ++j) {
    const double mass = kernel.shifted_density().row(j).sum() * h;
    residual = std::max(residual, std::abs(mass - 1.0));
  }
  return residual;
}

Eigen::VectorXd output_density(const ReductionKernel& kernel,
                               const WaveFunction& psi) {
  if (psi.particle_count != 1)
    throw std::invalid_argument("output_density expects a single-particle state");
  if (psi.amplitudes.size() != kernel.n_sites())
    throw std::invalid_argument("state dimension does not match kernel");
  if (std::abs(psi.norm2() - 1.0) > 1e-8)
    throw std::invalid_argument("state must be normalized within 1e-8");

  const double a = psi.grid->spacing;
  Eigen::VectorXd weights(kernel.n_sites());
  for (int j = 0; j < kernel.n_sites(); ++j)
    weights[j] = std::norm(psi.amplitudes[j]) * a;
  return kernel.shifted_density().transpose() * weights;
}

}  // namespace chamber

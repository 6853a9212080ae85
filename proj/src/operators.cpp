#include "chamber/operators.hpp"

#include <stdexcept>
#include <unsupported/Eigen/KroneckerProduct>

namespace chamber {

namespace {
constexpr double kHermTol = 1e-12;
}

double DenseOperator::hermiticity_defect() const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

DenseOperator make_operator(Eigen::MatrixXcd entries, bool hermitian_hint) {
  if (entries.rows() != entries.cols())
    throw std::invalid_argument("operator must be square");
  DenseOperator op{std::move(entries), hermitian_hint};
  if (hermitian_hint && op.hermiticity_defect() > kHermTol)
    throw std::invalid_argument("operator not Hermitian within 1e-12");
  return op;
}

DenseOperator position_operator(const LatticeGrid& grid) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(grid.n_sites, grid.n_sites);
  for (int j = 0; j < grid.n_sites; ++j) m(j, j) = grid.positions[j];
  return make_operator(std::move(m), true);
}

namespace {

Eigen::MatrixXcd single_particle_h(const LatticeGrid& grid, double mass,
                                   const std::vector<double>& potential,
                                   double hbar) {
  const int n = grid.n_sites;
  const double t = hbar * hbar / (2.0 * mass * grid.spacing * grid.spacing);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    h(j, j) = 2.0 * t + potential[j];
    if (j + 1 < n) {
      h(j, j + 1) = -t;
      h(j + 1, j) = -t;
    }
  }
  if (grid.boundary == Boundary::periodic && n > 2) {
    h(0, n - 1) += -t;
    h(n - 1, 0) += -t;
  }
  return h;
}

}  // namespace

DenseOperator hamiltonian(const LatticeGrid& grid, double mass,
                          const std::vector<double>& potential,
                          const PairPotential& pair_potential,
                          int particle_count, double hbar) {
  if (!(mass > 0.0)) throw std::invalid_argument("mass > 0 violated");
  if (static_cast<int>(potential.size()) != grid.n_sites)
    throw std::invalid_argument("potential length must equal n_sites");
  const int dim = tensor_dim(grid.n_sites, particle_count);

  const Eigen::MatrixXcd h1 = single_particle_h(grid, mass, potential, hbar);
  if (particle_count == 1 && !pair_potential)
    return make_operator(h1, true);

  DenseOperator h1op{h1, true};
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 1; k <= particle_count; ++k)
    h += embed_single(h1op, k, particle_count).entries;

  if (pair_potential) {
    const int n = grid.n_sites;
    for (int a = 0; a < dim; ++a) {
      // decode tensor digits of a (particle 1 most significant)
      int rest = a;
      std::vector<int> digit(particle_count);
      for (int k = particle_count - 1; k >= 0; --k) {
        digit[k] = rest % n;
        rest /= n;
      }
      double w = 0.0;
      for (int k = 0; k < particle_count; ++k)
        for (int l = k + 1; l < particle_count; ++l)
          w += pair_potential(grid.positions[digit[k]], grid.positions[digit[l]]);
      h(a, a) += w;
    }
  }
  return make_operator(std::move(h), true);
}

DenseOperator embed_single(const DenseOperator& op, int k, int particle_count) {
  if (k < 1 || k > particle_count)
    throw std::invalid_argument("particle label k must satisfy 1 <= k <= M");
  const int n = op.dim();
  tensor_dim(n, particle_count);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int j = 1; j <= particle_count; ++j) {
    const Eigen::MatrixXcd& factor =
        (j == k) ? op.entries
                 : Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(n, n));
    out = Eigen::kroneckerProduct(out, factor).eval();
  }
  return DenseOperator{std::move(out), op.hermitian_flag};
}

UnitaryPropagator::UnitaryPropagator(const DenseOperator& h, double hbar)
    : h_(h.entries), hbar_(hbar) {
  if (!(hbar > 0.0)) throw std::invalid_argument("hbar > 0 violated");
  if (h.hermiticity_defect() > kHermTol)
    throw std::invalid_argument("operator not Hermitian within 1e-12");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h_);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

Eigen::VectorXcd UnitaryPropagator::apply(const Eigen::VectorXcd& psi,
                                          double dt) const {
  if (psi.size() != eigenvalues_.size())
    throw std::invalid_argument("state dimension does not match operator");
  Eigen::VectorXcd coeffs = eigenvectors_.adjoint() * psi;
  for (long j = 0; j < coeffs.size(); ++j)
    coeffs[j] *= std::exp(cplx(0.0, -eigenvalues_[j] * dt / hbar_));
  return eigenvectors_ * coeffs;
}

WaveFunction UnitaryPropagator::evolve(const WaveFunction& psi,
                                       double dt) const {
  WaveFunction out = psi;
  out.amplitudes = apply(psi.amplitudes, dt);
  return out;
}

Eigen::MatrixXcd UnitaryPropagator::matrix(double dt) const {
  Eigen::VectorXcd phases(eigenvalues_.size());
  for (long j = 0; j < phases.size(); ++j)
    phases[j] = std::exp(cplx(0.0, -eigenvalues_[j] * dt / hbar_));
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

WaveFunction evolve_unitary(const DenseOperator& h, const WaveFunction& psi,
                            double dt, double hbar) {
  return UnitaryPropagator(h, hbar).evolve(psi, dt);
}

}  // namespace chamber

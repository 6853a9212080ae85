#include "chamber/packet.hpp"

#include <cmath>
#include <stdexcept>

namespace chamber {

int MeterGrid::index_of(double y) const {
  const double pos = (y + half_width) / step;
  const long i = std::lround(pos);
  if (i < 0 || i >= points.size() || std::abs(points[i] - y) > 1e-9 * std::max(1.0, std::abs(y)))
    throw std::invalid_argument("meter reading is not on the grid");
  return static_cast<int>(i);
}

MeterGrid make_meter_grid(double half_width, double step) {
  if (!(half_width > 0.0) || !(step > 0.0))
    throw std::invalid_argument("meter grid requires half_width > 0 and step > 0");
  const double cells = 2.0 * half_width / step;
  const long n_cells = std::lround(cells);
  if (std::abs(cells - static_cast<double>(n_cells)) > 1e-9)
    throw std::invalid_argument("2 * half_width must be an integer multiple of step");
  MeterGrid grid;
  grid.half_width = half_width;
  grid.step = step;
  grid.points.resize(n_cells + 1);
  for (long i = 0; i <= n_cells; ++i)
    grid.points[i] = -half_width + static_cast<double>(i) * step;
  return grid;
}

namespace {

// 5-point finite-difference first and second derivatives, one-sided stencils
// at the two points on each end.
void differentiate(const Eigen::VectorXcd& f, double h, Eigen::VectorXcd& d1,
                   Eigen::VectorXcd& d2) {
  const long n = f.size();
  if (n < 5) throw std::invalid_argument("derivative tables need >= 5 points");
  d1.resize(n);
  d2.resize(n);
  const double ih = 1.0 / (12.0 * h);
  const double ih2 = 1.0 / (12.0 * h * h);
  d1[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * ih;
  d1[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * ih;
  d2[0] = (35.0 * f[0] - 104.0 * f[1] + 114.0 * f[2] - 56.0 * f[3] + 11.0 * f[4]) * ih2;
  d2[1] = (11.0 * f[0] - 20.0 * f[1] + 6.0 * f[2] + 4.0 * f[3] - f[4]) * ih2;
  for (long i = 2; i < n - 2; ++i) {
    d1[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * ih;
    d2[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) * ih2;
  }
  d1[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * ih;
  d1[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * ih;
  d2[n - 1] = (35.0 * f[n - 1] - 104.0 * f[n - 2] + 114.0 * f[n - 3] - 56.0 * f[n - 4] + 11.0 * f[n - 5]) * ih2;
  d2[n - 2] = (11.0 * f[n - 1] - 20.0 * f[n - 2] + 6.0 * f[n - 3] + 4.0 * f[n - 4] - f[n - 5]) * ih2;
}

}  // namespace

void PointerPacket::build_tables() {
  const long n = values_.size();
  density_.resize(n);
  for (long i = 0; i < n; ++i) density_[i] = std::norm(values_[i]);

  norm2_ = density_.sum() * grid_.step;
  if (std::abs(norm2_ - 1.0) > 1e-8)
    throw std::invalid_argument("packet norm deviates from 1 by more than 1e-8");

  differentiate(values_, grid_.step, deriv1_, deriv2_);

  lprime_.resize(n);
  lsecond_.resize(n);
  for (long i = 0; i < n; ++i) {
    if (values_[i] == cplx(0.0, 0.0)) {
      if (i > 0 && i + 1 < n)
        throw std::invalid_argument("packet vanishes in the grid interior");
      lprime_[i] = 0.0;
      lsecond_[i] = 0.0;
    } else {
      lprime_[i] = deriv1_[i] / values_[i];
      lsecond_[i] = deriv2_[i] / values_[i];
    }
  }

  cplx overlap{0.0, 0.0};
  double d1sq = 0.0;
  c_sym_ = cplx{0.0, 0.0};
  c_abs_ = 0.0;
  for (long i = 0; i < n; ++i) {
    overlap += std::conj(values_[i]) * deriv1_[i];
    d1sq += std::norm(deriv1_[i]);
    c_sym_ += lprime_[i] * lprime_[i] * density_[i];
    c_abs_ += std::norm(lprime_[i]) * density_[i];
  }
  p0_ = hbar_ * (overlap * grid_.step).imag();
  sigma2_ = hbar_ * hbar_ * d1sq * grid_.step;
  c_sym_ *= grid_.step;
  c_abs_ *= grid_.step;
}

PointerPacket PointerPacket::gaussian(double half_width, double step,
                                      double boost, double hbar) {
  if (!(half_width >= 6.0))
    throw std::invalid_argument("half_width >= 6 violated (half_width = " +
                                std::to_string(half_width) + ")");
  if (!(step <= 1.0 / 64.0))
    throw std::invalid_argument("step <= 1/64 violated (step = " +
                                std::to_string(step) + ")");
  PointerPacket p;
  p.grid_ = make_meter_grid(half_width, step);
  p.kind_ = boost == 0.0 ? PacketKind::gaussian : PacketKind::gaussian_boosted;
  p.boost_ = boost;
  p.hbar_ = hbar;
  const long n = p.grid_.points.size();
  p.values_.resize(n);
  for (long i = 0; i < n; ++i) {
    const double y = p.grid_.points[i];
    p.values_[i] = std::exp(-0.5 * kPi * y * y) *
                   std::exp(cplx(0.0, boost * y / hbar));
  }
  p.build_tables();
  return p;
}

PointerPacket PointerPacket::custom(MeterGrid grid, Eigen::VectorXcd values,
                                    double hbar) {
  if (values.size() != grid.points.size())
    throw std::invalid_argument("value count does not match the meter grid");
  PointerPacket p;
  p.grid_ = std::move(grid);
  p.kind_ = PacketKind::custom;
  p.hbar_ = hbar;
  double n2 = 0.0;
  for (long i = 0; i < values.size(); ++i) n2 += std::norm(values[i]);
  n2 *= p.grid_.step;
  if (!(n2 > 0.0)) throw std::invalid_argument("custom packet has zero norm");
  p.values_ = values / std::sqrt(n2);
  p.build_tables();
  return p;
}

cplx PointerPacket::value_at(double y) const {
  if (kind_ != PacketKind::custom)
    return std::exp(-0.5 * kPi * y * y) * std::exp(cplx(0.0, boost_ * y / hbar_));

  const long n = values_.size();
  const double pos = (y + grid_.half_width) / grid_.step;
  if (pos < 0.0 || pos > static_cast<double>(n - 1)) return {0.0, 0.0};
  long base = static_cast<long>(std::floor(pos)) - 1;
  if (base < 0) base = 0;
  if (base > n - 4) base = n - 4;
  const double s = pos - static_cast<double>(base);
  // 4-point Lagrange interpolation at offsets 0..3
  const double w0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
  const double w1 = s * (s - 2.0) * (s - 3.0) / 2.0;
  const double w2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
  const double w3 = s * (s - 1.0) * (s - 2.0) / 6.0;
  return w0 * values_[base] + w1 * values_[base + 1] + w2 * values_[base + 2] +
         w3 * values_[base + 3];
}

PacketPtr gaussian_packet(double half_width, double step, double boost,
                          double hbar) {
  return std::make_shared<const PointerPacket>(
      PointerPacket::gaussian(half_width, step, boost, hbar));
}

ExpansionTables expansion_tables(const PointerPacket& packet) {
  return ExpansionTables{packet.lprime(), packet.lsecond(), packet.p0(),
                         packet.sigma2(), packet.osmotic()};
}

}  // namespace chamber

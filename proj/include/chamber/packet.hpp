#pragma once

#include <Eigen/Dense>
#include <memory>

#include "chamber/common.hpp"

namespace chamber {

enum class PacketKind { gaussian, gaussian_boosted, custom };

/// Truncated uniform meter grid over [-Y, Y] with step h, both ends included.
struct MeterGrid {
  double half_width = 8.0;
  double step = 1.0 / 256.0;
  Eigen::VectorXd points;

  int size() const { return static_cast<int>(points.size()); }
  /// Index of an on-grid reading; rejects off-grid values.
  int index_of(double y) const;
};

MeterGrid make_meter_grid(double half_width, double step);

/// Meter wavepacket f0 with derived logarithmic-derivative tables and moments.
///
/// The canonical packet has density |f0(y)|^2 = exp(-pi y^2); the boosted
/// variant multiplies by exp(i p0 y / hbar). Custom packets are normalized on
/// construction. Derivative tables use 5-point finite-difference stencils
/// (one-sided at the grid ends); moments are quadratures over the grid.
class PointerPacket {
 public:
  static PointerPacket gaussian(double half_width, double step,
                                double boost = 0.0, double hbar = 1.0);
  static PointerPacket custom(MeterGrid grid, Eigen::VectorXcd values,
                              double hbar = 1.0);

  const MeterGrid& grid() const { return grid_; }
  PacketKind kind() const { return kind_; }
  double boost() const { return boost_; }
  double hbar() const { return hbar_; }

  const Eigen::VectorXcd& values() const { return values_; }
  const Eigen::VectorXd& density() const { return density_; }

  // f0'/f0 and f0''/f0 on the grid; the osmotic velocity d(ln f0) equals
  // the first table.
  const Eigen::VectorXcd& lprime() const { return lprime_; }
  const Eigen::VectorXcd& lsecond() const { return lsecond_; }
  const Eigen::VectorXcd& osmotic() const { return lprime_; }

  double p0() const { return p0_; }          // (f0, P f0)
  double sigma2() const { return sigma2_; }  // hbar^2 (f0', f0')
  double norm2() const { return norm2_; }    // quadrature of |f0|^2

  // Noise second moments: c_sym = f0^T L' L' f0, c_abs = f0^T L'^dag L' f0.
  cplx lprime_second_moment() const { return c_sym_; }
  double lprime_abs_moment() const { return c_abs_; }

  /// f0 evaluated at an arbitrary argument: closed form for the gaussian
  /// kinds, cubic interpolation for custom packets (zero outside the grid).
  cplx value_at(double y) const;

 private:
  PointerPacket() = default;
  void build_tables();

  MeterGrid grid_;
  PacketKind kind_ = PacketKind::gaussian;
  double boost_ = 0.0;
  double hbar_ = 1.0;
  Eigen::VectorXcd values_;
  Eigen::VectorXd density_;
  Eigen::VectorXcd deriv1_, deriv2_;  // finite-difference f0', f0''
  Eigen::VectorXcd lprime_, lsecond_;
  double p0_ = 0.0, sigma2_ = 0.0, norm2_ = 1.0;
  cplx c_sym_{0.0, 0.0};
  double c_abs_ = 0.0;
};

using PacketPtr = std::shared_ptr<const PointerPacket>;

PacketPtr gaussian_packet(double half_width, double step, double boost = 0.0,
                          double hbar = 1.0);

struct ExpansionTables {
  Eigen::VectorXcd lprime;
  Eigen::VectorXcd lsecond;
  double p0;
  double sigma2;
  Eigen::VectorXcd osmotic;
};

ExpansionTables expansion_tables(const PointerPacket& packet);

}  // namespace chamber

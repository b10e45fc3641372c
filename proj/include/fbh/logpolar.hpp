#pragma once

#include <cmath>
#include <vector>

#include "fbh/field.hpp"
#include "fbh/lorentz.hpp"

namespace fbh {

/// Field resampled on a grid uniform in (log r, theta) around a center on
/// the line y = 0. Radii span [r0, r1]; theta spans [0, pi] for half
/// domains (endpoints on the flat line) or [0, 2pi) periodic. In these
/// coordinates |grad u|^2 dA = (|u_s|^2 + |u_theta|^2) ds dtheta, which is
/// what makes the neck quantities resolution-uniform across scales.
class LogPolarField {
 public:
  LogPolarField(const MapField& src, double cx, double r0, double r1,
                int nr, int ntheta, bool half);

  int nr() const { return nr_; }
  int ntheta() const { return nt_; }
  int dim() const { return dim_; }
  bool half() const { return half_; }
  double radius(int i) const { return r0_ * std::exp(i * ds_); }
  double theta(int j) const { return j * dt_; }
  double ds() const { return ds_; }
  double dtheta() const { return dt_; }

  double value(int i, int j, int c) const { return vals_[(i * nt_ + j) * dim_ + c]; }
  /// d/ds and d/dtheta (log-polar partials, not yet divided by r).
  double du_s(int i, int j, int c) const { return dus_[(i * nt_ + j) * dim_ + c]; }
  double du_t(int i, int j, int c) const { return dut_[(i * nt_ + j) * dim_ + c]; }

  double energy() const;          // \int |grad u|^2 over the (half-)annulus
  double angular_energy() const;  // \int |grad_theta u|^2
  double radial_energy() const;   // \int |grad_r u|^2
  /// max over the region of r |grad u|; the delta of the neck analysis.
  double scaled_sup_gradient() const;

  /// Per-row circle integrals \oint |grad_theta u|^2 r dtheta and radial
  /// counterpart (the two sides of the Pohozaev identity).
  void pohozaev_row(int i, double& angular, double& radial) const;

  /// Samples of |grad u| (or |grad_theta u|) with area weights, for the
  /// Lorentz norms on the annulus.
  std::vector<WeightedSample> gradient_samples(bool angular_only) const;

  /// \oint_{circle r_i} <V, e_r> r dtheta for a 2-component field V
  /// sampled on the same grid (full annuli only make this a closed flux).
  double radial_flux_row(int i) const;

 private:
  int nr_, nt_, dim_;
  bool half_;
  double cx_, r0_, r1_, ds_, dt_;
  std::vector<double> vals_, dus_, dut_;
  double theta_weight(int j) const {
    if (!half_) return dt_;
    return (j == 0 || j == nt_ - 1) ? 0.5 * dt_ : dt_;
  }
  double s_weight(int i) const { return (i == 0 || i == nr_ - 1) ? 0.5 * ds_ : ds_; }
};

}  // namespace fbh

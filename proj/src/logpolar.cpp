#include "fbh/logpolar.hpp"

#include <cmath>

namespace fbh {

LogPolarField::LogPolarField(const MapField& src, double cx, double r0, double r1,
                             int nr, int ntheta, bool half)
    : nr_(nr), nt_(ntheta), dim_(src.dim()), half_(half), cx_(cx), r0_(r0), r1_(r1) {
  if (!(r0 > 0.0 && r1 > r0)) throw std::invalid_argument("LogPolarField: need 0 < r0 < r1");
  if (nr < 2 || ntheta < 4) throw std::invalid_argument("LogPolarField: grid too small");
  ds_ = std::log(r1 / r0) / (nr - 1);
  dt_ = half ? M_PI / (ntheta - 1) : 2.0 * M_PI / ntheta;

  vals_.resize((std::size_t)nr_ * nt_ * dim_);
  std::vector<double> buf(dim_);
  for (int i = 0; i < nr_; ++i) {
    double r = radius(i);
    for (int j = 0; j < nt_; ++j) {
      double th = theta(j);
      src.interpolate(cx_ + r * std::cos(th), r * std::sin(th), buf);
      for (int c = 0; c < dim_; ++c) vals_[((std::size_t)i * nt_ + j) * dim_ + c] = buf[c];
    }
  }

  dus_.assign(vals_.size(), 0.0);
  dut_.assign(vals_.size(), 0.0);
  auto v = [&](int i, int j, int c) { return vals_[((std::size_t)i * nt_ + j) * dim_ + c]; };
  for (int i = 0; i < nr_; ++i) {
    for (int j = 0; j < nt_; ++j) {
      for (int c = 0; c < dim_; ++c) {
        double d;
        if (i > 0 && i < nr_ - 1) d = (v(i + 1, j, c) - v(i - 1, j, c)) / (2 * ds_);
        else if (i == 0) d = (-3 * v(0, j, c) + 4 * v(1, j, c) - v(2, j, c)) / (2 * ds_);
        else d = (3 * v(i, j, c) - 4 * v(i - 1, j, c) + v(i - 2, j, c)) / (2 * ds_);
        dus_[((std::size_t)i * nt_ + j) * dim_ + c] = d;

        if (!half_) {
          int jp = (j + 1) % nt_, jm = (j + nt_ - 1) % nt_;
          d = (v(i, jp, c) - v(i, jm, c)) / (2 * dt_);
        } else if (j > 0 && j < nt_ - 1) {
          d = (v(i, j + 1, c) - v(i, j - 1, c)) / (2 * dt_);
        } else if (j == 0) {
          d = (-3 * v(i, 0, c) + 4 * v(i, 1, c) - v(i, 2, c)) / (2 * dt_);
        } else {
          d = (3 * v(i, j, c) - 4 * v(i, j - 1, c) + v(i, j - 2, c)) / (2 * dt_);
        }
        dut_[((std::size_t)i * nt_ + j) * dim_ + c] = d;
      }
    }
  }
}

double LogPolarField::energy() const {
  double e = 0.0;
  for (int i = 0; i < nr_; ++i)
    for (int j = 0; j < nt_; ++j) {
      double s2 = 0.0;
      for (int c = 0; c < dim_; ++c)
        s2 += du_s(i, j, c) * du_s(i, j, c) + du_t(i, j, c) * du_t(i, j, c);
      e += s2 * s_weight(i) * theta_weight(j);
    }
  return e;
}

double LogPolarField::angular_energy() const {
  double e = 0.0;
  for (int i = 0; i < nr_; ++i)
    for (int j = 0; j < nt_; ++j) {
      double s2 = 0.0;
      for (int c = 0; c < dim_; ++c) s2 += du_t(i, j, c) * du_t(i, j, c);
      e += s2 * s_weight(i) * theta_weight(j);
    }
  return e;
}

double LogPolarField::radial_energy() const {
  double e = 0.0;
  for (int i = 0; i < nr_; ++i)
    for (int j = 0; j < nt_; ++j) {
      double s2 = 0.0;
      for (int c = 0; c < dim_; ++c) s2 += du_s(i, j, c) * du_s(i, j, c);
      e += s2 * s_weight(i) * theta_weight(j);
    }
  return e;
}

double LogPolarField::scaled_sup_gradient() const {
  double m = 0.0;
  for (int i = 0; i < nr_; ++i)
    for (int j = 0; j < nt_; ++j) {
      double s2 = 0.0;
      for (int c = 0; c < dim_; ++c)
        s2 += du_s(i, j, c) * du_s(i, j, c) + du_t(i, j, c) * du_t(i, j, c);
      m = std::max(m, s2);
    }
  return std::sqrt(m);
}

void LogPolarField::pohozaev_row(int i, double& angular, double& radial) const {
  angular = radial = 0.0;
  double r = radius(i);
  for (int j = 0; j < nt_; ++j) {
    double a2 = 0.0, r2 = 0.0;
    for (int c = 0; c < dim_; ++c) {
      a2 += du_t(i, j, c) * du_t(i, j, c);
      r2 += du_s(i, j, c) * du_s(i, j, c);
    }
    // |grad_theta u|^2 r dtheta = (u_theta^2 / r^2) r dtheta
    angular += a2 / r * theta_weight(j);
    radial += r2 / r * theta_weight(j);
  }
}

std::vector<WeightedSample> LogPolarField::gradient_samples(bool angular_only) const {
  std::vector<WeightedSample> out;
  out.reserve((std::size_t)nr_ * nt_);
  for (int i = 0; i < nr_; ++i) {
    double r = radius(i);
    for (int j = 0; j < nt_; ++j) {
      double s2 = 0.0;
      for (int c = 0; c < dim_; ++c) {
        s2 += du_t(i, j, c) * du_t(i, j, c);
        if (!angular_only) s2 += du_s(i, j, c) * du_s(i, j, c);
      }
      out.push_back({std::sqrt(s2) / r, r * r * s_weight(i) * theta_weight(j)});
    }
  }
  return out;
}

double LogPolarField::radial_flux_row(int i) const {
  if (dim_ != 2) throw std::invalid_argument("radial_flux_row: needs a 2-component field");
  double r = radius(i), acc = 0.0;
  for (int j = 0; j < nt_; ++j) {
    double th = theta(j);
    double vr = value(i, j, 0) * std::cos(th) + value(i, j, 1) * std::sin(th);
    acc += vr * r * theta_weight(j);
  }
  return acc;
}

}  // namespace fbh

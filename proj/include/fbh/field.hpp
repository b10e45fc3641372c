#pragma once

#include <cassert>
#include <iosfwd>
#include <span>
#include <vector>

#include "fbh/domain.hpp"

namespace fbh {

/// Vector-valued field on a Grid: one R^{dim} value per lattice node
/// (values at outside nodes are present but meaningless). dim = n+1 for
/// ball-valued maps; dim = 1 for scalar fields.
class MapField {
 public:
  MapField(const Grid& g, int dim, bool ball_valued = false)
      : grid_(&g), dim_(dim), ball_valued_(ball_valued),
        data_(g.num_nodes() * dim, 0.0) {
    if (dim < 1) throw std::invalid_argument("MapField: dim must be >= 1");
  }

  const Grid& grid() const { return *grid_; }
  int dim() const { return dim_; }
  int ambient_sphere_dim() const { return dim_ - 1; }
  bool ball_valued() const { return ball_valued_; }
  void set_ball_valued(bool b) { ball_valued_ = b; }

  std::span<double> at(std::size_t idx) { return {data_.data() + idx * dim_, (std::size_t)dim_}; }
  std::span<const double> at(std::size_t idx) const {
    return {data_.data() + idx * dim_, (std::size_t)dim_};
  }
  double& operator()(std::size_t idx, int c) { return data_[idx * dim_ + c]; }
  double operator()(std::size_t idx, int c) const { return data_[idx * dim_ + c]; }

  double norm_at(std::size_t idx) const;

  /// max over in-domain nodes of ||value| - limit|; used by the ball tag check.
  double max_ball_violation() const;

  /// Bilinear interpolation at (x, y), skipping outside lattice corners
  /// (weights renormalised over valid corners). Throws if no corner of the
  /// containing cell is in the domain.
  void interpolate(double x, double y, std::span<double> out) const;

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

 private:
  const Grid* grid_;
  int dim_;
  bool ball_valued_;
  std::vector<double> data_;
};

using ScalarField = MapField;  // dim == 1

/// CSV layout: header "x,y,v0,...,vk", one row per in-domain node.
void write_csv(std::ostream& os, const MapField& f);
/// Reads values back onto an existing grid; row order must match write_csv.
void read_csv(std::istream& is, MapField& f);

}  // namespace fbh

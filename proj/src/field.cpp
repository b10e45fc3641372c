#include "fbh/field.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace fbh {

double MapField::norm_at(std::size_t idx) const {
  double s = 0.0;
  for (int c = 0; c < dim_; ++c) s += (*this)(idx, c) * (*this)(idx, c);
  return std::sqrt(s);
}

double MapField::max_ball_violation() const {
  double worst = 0.0;
  for (std::size_t idx = 0; idx < grid_->num_nodes(); ++idx) {
    if (grid_->node_class(idx) == NodeClass::outside) continue;
    double ex = norm_at(idx) - 1.0;
    if (ex > worst) worst = ex;
  }
  return worst;
}

void MapField::interpolate(double x, double y, std::span<double> out) const {
  const Grid& g = *grid_;
  double fx = x / g.h(), fy = y / g.h();
  int i0 = (int)std::floor(fx), j0 = (int)std::floor(fy);
  // clamp to lattice
  if (i0 < -g.half_extent()) i0 = -g.half_extent();
  if (i0 >= g.half_extent()) i0 = g.half_extent() - 1;
  if (j0 < g.jmin()) j0 = g.jmin();
  if (j0 >= g.half_extent()) j0 = g.half_extent() - 1;
  double tx = fx - i0, ty = fy - j0;

  double wsum = 0.0;
  for (int c = 0; c < dim_; ++c) out[c] = 0.0;
  const int di[4] = {0, 1, 0, 1};
  const int dj[4] = {0, 0, 1, 1};
  for (int k = 0; k < 4; ++k) {
    int i = i0 + di[k], j = j0 + dj[k];
    if (!g.in_domain(i, j)) continue;
    double w = (di[k] ? tx : 1.0 - tx) * (dj[k] ? ty : 1.0 - ty);
    if (w <= 0.0) continue;
    std::size_t idx = g.index(i, j);
    for (int c = 0; c < dim_; ++c) out[c] += w * (*this)(idx, c);
    wsum += w;
  }
  if (wsum <= 0.0) {
    // fall back to the nearest in-domain corner
    for (int k = 0; k < 4; ++k) {
      int i = i0 + di[k], j = j0 + dj[k];
      if (!g.in_domain(i, j)) continue;
      std::size_t idx = g.index(i, j);
      for (int c = 0; c < dim_; ++c) out[c] = (*this)(idx, c);
      return;
    }
    throw std::runtime_error("MapField::interpolate: point outside domain");
  }
  for (int c = 0; c < dim_; ++c) out[c] /= wsum;
}

void write_csv(std::ostream& os, const MapField& f) {
  os << "x,y";
  for (int c = 0; c < f.dim(); ++c) os << ",v" << c;
  os << "\n";
  const Grid& g = f.grid();
  os.precision(17);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    double x, y;
    g.node_coords(idx, x, y);
    os << x << "," << y;
    for (int c = 0; c < f.dim(); ++c) os << "," << f(idx, c);
    os << "\n";
  }
}

void read_csv(std::istream& is, MapField& f) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_csv: empty input");
  const Grid& g = f.grid();
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    if (!std::getline(is, line)) throw std::runtime_error("read_csv: truncated input");
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');  // x
    std::getline(ss, tok, ',');  // y
    for (int c = 0; c < f.dim(); ++c) {
      if (!std::getline(ss, tok, ',')) throw std::runtime_error("read_csv: short row");
      f(idx, c) = std::stod(tok);
    }
  }
}

}  // namespace fbh

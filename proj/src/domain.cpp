#include "fbh/domain.hpp"

#include <cmath>

namespace fbh {

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::half_disc: return "half_disc";
    case DomainKind::full_disc: return "full_disc";
    case DomainKind::annulus: return "annulus";
    case DomainKind::half_annulus: return "half_annulus";
    case DomainKind::rectangle_halfplane_window: return "rectangle_halfplane_window";
  }
  return "?";
}

void DomainSpec::validate() const {
  if (outer <= 0.0) throw std::invalid_argument("DomainSpec: outer radius must be > 0");
  if (inner < 0.0) throw std::invalid_argument("DomainSpec: inner radius must be >= 0");
  if ((kind == DomainKind::annulus || kind == DomainKind::half_annulus) && inner >= outer)
    throw std::invalid_argument("DomainSpec: inner radius must be < outer radius");
  if (nodes_per_diameter < 8)
    throw std::invalid_argument("DomainSpec: need at least 8 nodes per diameter");
}

bool DomainSpec::contains(double x, double y) const {
  const double tol = 1e-12 * outer;
  if (is_half() && y < -tol) return false;
  switch (kind) {
    case DomainKind::half_disc:
    case DomainKind::full_disc:
      return x * x + y * y <= outer * outer * (1.0 + 1e-12);
    case DomainKind::annulus:
    case DomainKind::half_annulus: {
      double r2 = x * x + y * y;
      return r2 <= outer * outer * (1.0 + 1e-12) &&
             r2 >= inner * inner * (1.0 - 1e-12);
    }
    case DomainKind::rectangle_halfplane_window:
      return x >= -outer - tol && x <= outer + tol && y <= outer + tol;
  }
  return false;
}

double DomainSpec::area() const {
  const double pi = 3.14159265358979323846;
  switch (kind) {
    case DomainKind::full_disc: return pi * outer * outer;
    case DomainKind::half_disc: return 0.5 * pi * outer * outer;
    case DomainKind::annulus: return pi * (outer * outer - inner * inner);
    case DomainKind::half_annulus: return 0.5 * pi * (outer * outer - inner * inner);
    case DomainKind::rectangle_halfplane_window: return 2.0 * outer * outer;
  }
  return 0.0;
}

Grid::Grid(const DomainSpec& spec) : spec_(spec) {
  spec_.validate();
  M_ = (spec_.nodes_per_diameter - 1) / 2;
  if (2 * M_ + 1 != spec_.nodes_per_diameter) M_ += 1;  // force odd so y=0 row exists
  h_ = spec_.outer / M_;
  jmin_ = spec_.is_half() ? 0 : -M_;

  klass_.assign(num_nodes(), NodeClass::outside);
  area_.assign(num_nodes(), 0.0);

  auto member = [&](int i, int j) {
    return in_lattice(i, j) && spec_.contains(x(i), y(j));
  };

  for (int j = jmin_; j <= M_; ++j) {
    for (int i = -M_; i <= M_; ++i) {
      if (!member(i, j)) continue;
      std::size_t idx = index(i, j);
      bool edge = !member(i - 1, j) || !member(i + 1, j) ||
                  !member(i, j - 1) || !member(i, j + 1);
      if (spec_.is_half() && j == 0) {
        // Corners where the flat segment meets the arc count as arc nodes.
        bool corner = !member(i - 1, 0) || !member(i + 1, 0);
        klass_[idx] = corner ? NodeClass::arc_boundary : NodeClass::flat_boundary;
      } else if (edge) {
        klass_[idx] = NodeClass::arc_boundary;
      } else {
        klass_[idx] = NodeClass::interior;
      }
    }
  }

  // For half domains a flat node with an outside neighbour above is still arc.
  if (spec_.is_half()) {
    for (int i = -M_; i <= M_; ++i) {
      if (!member(i, 0)) continue;
      std::size_t idx = index(i, 0);
      if (klass_[idx] == NodeClass::flat_boundary && !member(i, 1))
        klass_[idx] = NodeClass::arc_boundary;
    }
  }

  // Cut-cell areas by subsampling each h x h cell.
  const int S = 6;
  for (int j = jmin_; j <= M_; ++j) {
    for (int i = -M_; i <= M_; ++i) {
      std::size_t idx = index(i, j);
      if (klass_[idx] == NodeClass::outside) continue;
      int inside = 0;
      for (int a = 0; a < S; ++a) {
        for (int b = 0; b < S; ++b) {
          double xs = x(i) + ((a + 0.5) / S - 0.5) * h_;
          double ys = y(j) + ((b + 0.5) / S - 0.5) * h_;
          if (spec_.contains(xs, ys)) ++inside;
        }
      }
      area_[idx] = h_ * h_ * inside / double(S * S);
      total_area_ += area_[idx];
    }
  }

  for (std::size_t idx = 0; idx < num_nodes(); ++idx) {
    switch (klass_[idx]) {
      case NodeClass::interior: interior_.push_back(idx); break;
      case NodeClass::arc_boundary: arc_.push_back(idx); break;
      case NodeClass::flat_boundary: flat_.push_back(idx); break;
      default: break;
    }
  }
}

double Grid::region_fraction(std::size_t idx,
                             const std::function<bool(double, double)>& pred) const {
  const int S = 4;
  double xc, yc;
  node_coords(idx, xc, yc);
  int hit = 0;
  for (int a = 0; a < S; ++a)
    for (int b = 0; b < S; ++b) {
      double xs = xc + ((a + 0.5) / S - 0.5) * h_;
      double ys = yc + ((b + 0.5) / S - 0.5) * h_;
      if (spec_.contains(xs, ys) && pred(xs, ys)) ++hit;
    }
  return hit / double(S * S);
}

}  // namespace fbh

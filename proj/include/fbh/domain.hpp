#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbh {

enum class DomainKind {
  half_disc,
  full_disc,
  annulus,
  half_annulus,
  rectangle_halfplane_window,
};

std::string to_string(DomainKind k);

/// Planar model domain: a disc/annulus (possibly halved at y = 0) or a
/// half-plane window [-R,R] x [0,R]. Radii are dimensionless.
struct DomainSpec {
  DomainKind kind = DomainKind::half_disc;
  double inner = 0.0;  // inner radius (annuli only)
  double outer = 1.0;  // outer radius / window half-width
  int nodes_per_diameter = 65;  // lattice nodes across 2*outer

  void validate() const;
  bool is_half() const {
    return kind == DomainKind::half_disc || kind == DomainKind::half_annulus ||
           kind == DomainKind::rectangle_halfplane_window;
  }
  double spacing() const { return 2.0 * outer / (nodes_per_diameter - 1); }
  // Analytic membership, closed domain.
  bool contains(double x, double y) const;
  double area() const;
};

enum class NodeClass : unsigned char {
  outside,
  interior,
  arc_boundary,   // curved (or window-side) Dirichlet boundary
  flat_boundary,  // the segment I on y = 0 of a half domain
};

/// Uniform Cartesian lattice masked to a DomainSpec. Nodes live at
/// (i*h, j*h), i in [-M,M], j in [jmin,M]; classification and cut-cell
/// quadrature weights are fixed at construction. Immutable.
class Grid {
 public:
  explicit Grid(const DomainSpec& spec);

  const DomainSpec& spec() const { return spec_; }
  double h() const { return h_; }
  int half_extent() const { return M_; }
  int jmin() const { return jmin_; }
  int nx() const { return 2 * M_ + 1; }
  int ny() const { return M_ - jmin_ + 1; }
  std::size_t num_nodes() const { return static_cast<std::size_t>(nx()) * ny(); }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j - jmin_) * nx() + (i + M_);
  }
  bool in_lattice(int i, int j) const {
    return i >= -M_ && i <= M_ && j >= jmin_ && j <= M_;
  }
  double x(int i) const { return i * h_; }
  double y(int j) const { return j * h_; }

  NodeClass node_class(int i, int j) const { return klass_[index(i, j)]; }
  NodeClass node_class(std::size_t idx) const { return klass_[idx]; }
  bool in_domain(int i, int j) const {
    return in_lattice(i, j) && klass_[index(i, j)] != NodeClass::outside;
  }
  /// Cut-cell quadrature weight (area units) of the node's cell.
  double cell_area(std::size_t idx) const { return area_[idx]; }
  double total_area() const { return total_area_; }

  const std::vector<std::size_t>& flat_boundary() const { return flat_; }
  const std::vector<std::size_t>& arc_boundary() const { return arc_; }
  const std::vector<std::size_t>& interior() const { return interior_; }

  void node_coords(std::size_t idx, double& xo, double& yo) const {
    int j = static_cast<int>(idx) / nx() + jmin_;
    int i = static_cast<int>(idx) % nx() - M_;
    xo = x(i);
    yo = y(j);
  }
  void node_ij(std::size_t idx, int& i, int& j) const {
    j = static_cast<int>(idx) / nx() + jmin_;
    i = static_cast<int>(idx) % nx() - M_;
  }

  /// Fraction of the cell around node idx lying inside the domain and
  /// satisfying `pred`, by subsampling. Used for sub-region quadrature.
  double region_fraction(std::size_t idx,
                         const std::function<bool(double, double)>& pred) const;

 private:
  DomainSpec spec_;
  double h_;
  int M_;
  int jmin_;
  std::vector<NodeClass> klass_;
  std::vector<double> area_;
  std::vector<std::size_t> flat_, arc_, interior_;
  double total_area_ = 0.0;
};

}  // namespace fbh

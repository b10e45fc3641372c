#include "fbh/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace fbh {

namespace {

// One-dimensional one-sided/centered derivative of component c along
// direction (di, dj). Returns false if no usable stencil exists.
bool deriv_1d(const MapField& f, int i, int j, int di, int dj, int c, double& out) {
  const Grid& g = f.grid();
  const double h = g.h();
  auto val = [&](int a, int b) { return f(g.index(a, b), c); };
  bool m1 = g.in_domain(i - di, j - dj);
  bool p1 = g.in_domain(i + di, j + dj);
  if (m1 && p1) {
    out = (val(i + di, j + dj) - val(i - di, j - dj)) / (2 * h);
    return true;
  }
  if (p1 && g.in_domain(i + 2 * di, j + 2 * dj)) {
    out = (-3 * val(i, j) + 4 * val(i + di, j + dj) - val(i + 2 * di, j + 2 * dj)) / (2 * h);
    return true;
  }
  if (m1 && g.in_domain(i - 2 * di, j - 2 * dj)) {
    out = (3 * val(i, j) - 4 * val(i - di, j - dj) + val(i - 2 * di, j - 2 * dj)) / (2 * h);
    return true;
  }
  if (p1) { out = (val(i + di, j + dj) - val(i, j)) / h; return true; }
  if (m1) { out = (val(i, j) - val(i - di, j - dj)) / h; return true; }
  out = 0.0;
  return false;
}

}  // namespace

Gradient gradient(const MapField& f) {
  const Grid& g = f.grid();
  Gradient out{MapField(g, f.dim()), MapField(g, f.dim())};
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    int i, j;
    g.node_ij(idx, i, j);
    for (int c = 0; c < f.dim(); ++c) {
      double d;
      deriv_1d(f, i, j, 1, 0, c, d);
      out.gx(idx, c) = d;
      deriv_1d(f, i, j, 0, 1, c, d);
      out.gy(idx, c) = d;
    }
  }
  return out;
}

double dirichlet_energy(const MapField& f, const std::optional<RegionPred>& region) {
  const Grid& g = f.grid();
  Gradient grad = gradient(f);
  double e = 0.0;
  bool any = false;
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    if (region) {
      double x, y;
      g.node_coords(idx, x, y);
      if (!(*region)(x, y)) continue;
    }
    any = true;
    e += g.cell_area(idx) * grad.sq_norm_at(idx);
  }
  if (!any) throw std::invalid_argument("dirichlet_energy: empty region");
  return e;
}

double dirichlet_energy_fractional(const MapField& f, const RegionPred& region) {
  const Grid& g = f.grid();
  Gradient grad = gradient(f);
  double e = 0.0;
  const double h2 = g.h() * g.h();
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    double frac = g.region_fraction(idx, region);
    if (frac <= 0.0) continue;
    e += h2 * frac * grad.sq_norm_at(idx);
  }
  return e;
}

void flat_normal_derivative(const MapField& f, std::size_t idx, std::span<double> out) {
  const Grid& g = f.grid();
  int i, j;
  g.node_ij(idx, i, j);
  // nu = (0,-1): d_nu = -d_y, one-sided second order upward
  for (int c = 0; c < f.dim(); ++c) {
    double dy;
    deriv_1d(f, i, j, 0, 1, c, dy);
    out[c] = -dy;
  }
}

namespace {

// d_nu u at an arc node via interpolated samples along the inward normal.
void arc_normal_derivative(const MapField& f, std::size_t idx, double nx, double ny,
                           std::span<double> out) {
  const Grid& g = f.grid();
  const double h = g.h();
  double x, y;
  g.node_coords(idx, x, y);
  std::vector<double> u1(f.dim()), u2(f.dim());
  f.interpolate(x - h * nx, y - h * ny, u1);
  f.interpolate(x - 2 * h * nx, y - 2 * h * ny, u2);
  auto u0 = f.at(idx);
  for (int c = 0; c < f.dim(); ++c)
    out[c] = (3 * u0[c] - 4 * u1[c] + u2[c]) / (2 * h);
}

struct ArcNode {
  std::size_t idx;
  double theta;
};

// Angle-sorted quadrature weights on one circle of radius R; open arcs
// (half domains) get trapezoid end weights.
void circle_chain(const MapField& f, const std::vector<ArcNode>& nodes, double R,
                  double sign, bool full_circle, std::vector<BoundaryFlux>& out) {
  if (nodes.empty()) return;
  const std::size_t n = nodes.size();
  std::vector<double> nd(f.dim());
  for (std::size_t k = 0; k < n; ++k) {
    double tprev, tnext;
    if (full_circle) {
      tprev = nodes[(k + n - 1) % n].theta;
      tnext = nodes[(k + 1) % n].theta;
      if (k == 0) tprev -= 2 * M_PI;
      if (k == n - 1) tnext += 2 * M_PI;
    } else {
      tprev = (k == 0) ? nodes[0].theta : nodes[k - 1].theta;
      tnext = (k == n - 1) ? nodes[n - 1].theta : nodes[k + 1].theta;
    }
    double w = R * 0.5 * (tnext - tprev);
    double x, y;
    f.grid().node_coords(nodes[k].idx, x, y);
    double r = std::hypot(x, y);
    double nx = sign * x / r, ny = sign * y / r;
    arc_normal_derivative(f, nodes[k].idx, nx, ny, nd);
    double dens = 0.0;
    auto u = f.at(nodes[k].idx);
    for (int c = 0; c < f.dim(); ++c) dens += u[c] * nd[c];
    out.push_back({nodes[k].idx, nx, ny, w, dens});
  }
}

}  // namespace

std::vector<BoundaryFlux> boundary_flux_density(const MapField& f) {
  const Grid& g = f.grid();
  const DomainSpec& spec = g.spec();
  std::vector<BoundaryFlux> out;
  std::vector<double> nd(f.dim());

  // Flat segment: nu = (0,-1), trapezoid with spacing h.
  for (std::size_t idx : g.flat_boundary()) {
    flat_normal_derivative(f, idx, nd);
    double dens = 0.0;
    auto u = f.at(idx);
    for (int c = 0; c < f.dim(); ++c) dens += u[c] * nd[c];
    out.push_back({idx, 0.0, -1.0, g.h(), dens});
  }

  if (spec.kind == DomainKind::rectangle_halfplane_window) {
    for (std::size_t idx : g.arc_boundary()) {
      double x, y;
      g.node_coords(idx, x, y);
      double nx = 0, ny = 0;
      if (std::abs(x - spec.outer) < g.h() / 2) nx = 1;
      else if (std::abs(x + spec.outer) < g.h() / 2) nx = -1;
      else ny = 1;
      if (nx == 0 && ny == 0) ny = 1;
      arc_normal_derivative(f, idx, nx, ny, nd);
      double dens = 0.0;
      auto u = f.at(idx);
      for (int c = 0; c < f.dim(); ++c) dens += u[c] * nd[c];
      out.push_back({idx, nx, ny, g.h(), dens});
    }
    return out;
  }

  bool has_inner = spec.kind == DomainKind::annulus || spec.kind == DomainKind::half_annulus;
  double rsplit = has_inner ? 0.5 * (spec.inner + spec.outer) : 0.0;
  std::vector<ArcNode> outer_arc, inner_arc;
  for (std::size_t idx : g.arc_boundary()) {
    double x, y;
    g.node_coords(idx, x, y);
    double th = std::atan2(y, x);
    if (th < 0 && !spec.is_half()) th += 2 * M_PI;
    if (has_inner && std::hypot(x, y) < rsplit)
      inner_arc.push_back({idx, th});
    else
      outer_arc.push_back({idx, th});
  }
  auto by_theta = [](const ArcNode& a, const ArcNode& b) { return a.theta < b.theta; };
  std::sort(outer_arc.begin(), outer_arc.end(), by_theta);
  std::sort(inner_arc.begin(), inner_arc.end(), by_theta);
  bool full = !spec.is_half();
  circle_chain(f, outer_arc, spec.outer, +1.0, full, out);
  if (has_inner) circle_chain(f, inner_arc, spec.inner, -1.0, full, out);
  return out;
}

double boundary_flux_integral(const MapField& f) {
  double s = 0.0;
  for (const auto& bf : boundary_flux_density(f)) s += bf.weight * bf.density;
  return s;
}

}  // namespace fbh

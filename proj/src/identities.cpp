#include "fbh/identities.hpp"

#include <cmath>
#include <limits>

namespace fbh {

void IdentityReport::finalize() {
  max_mismatch = 0.0;
  double s2 = 0.0;
  for (double m : mismatch) {
    max_mismatch = std::max(max_mismatch, m);
    s2 += m * m;
  }
  rms_mismatch = mismatch.empty() ? 0.0 : std::sqrt(s2 / mismatch.size());
}

FreeBoundaryResidual free_boundary_residual(const MapField& u) {
  const Grid& g = u.grid();
  if (!g.spec().is_half())
    throw std::invalid_argument("free_boundary_residual: needs a half domain");
  FreeBoundaryResidual out{0.0, 0.0};
  std::vector<double> nd(u.dim());
  double acc = 0.0;
  for (std::size_t idx : g.flat_boundary()) {
    double mod = u.norm_at(idx);
    out.sup_modulus_defect = std::max(out.sup_modulus_defect, std::abs(mod - 1.0));
    flat_normal_derivative(u, idx, nd);
    double dot = 0.0, m2 = 0.0;
    auto uv = u.at(idx);
    for (int c = 0; c < u.dim(); ++c) dot += nd[c] * uv[c];
    double u2 = mod * mod;
    if (u2 < 1e-30) u2 = 1.0;
    for (int c = 0; c < u.dim(); ++c) {
      double t = nd[c] - dot * uv[c] / u2;
      m2 += t * t;
    }
    acc += g.h() * m2;
  }
  out.tangential_norm = std::sqrt(acc);
  return out;
}

IdentityReport pohozaev_check(const MapField& u, const std::vector<double>& radii,
                              double cx, int ntheta) {
  const Grid& g = u.grid();
  IdentityReport rep;
  rep.name = "pohozaev";
  rep.grid_h = g.h();
  for (double r : radii) {
    if (r < 8 * g.h())
      throw std::invalid_argument("pohozaev_check: radius too small for the grid");
    // thin annulus around r so radial derivatives are centered in s
    double band = std::exp(2.0 * g.h() / r);
    LogPolarField lp(u, cx, r / band, r * band, 5, ntheta, g.spec().is_half());
    double ang, rad;
    lp.pohozaev_row(2, ang, rad);
    rep.at.push_back(r);
    rep.mismatch.push_back(std::abs(ang - rad));
  }
  rep.finalize();
  return rep;
}

SphereDistanceProbe sphere_distance_probe(const MapField& u, double eps0) {
  const Grid& g = u.grid();
  if (!g.spec().is_half())
    throw std::invalid_argument("sphere_distance_probe: needs a half domain");
  SphereDistanceProbe p{};
  p.energy = dirichlet_energy(u);
  p.hypothesis_ok = p.energy <= eps0;
  if (!p.hypothesis_ok)
    throw std::invalid_argument("sphere_distance_probe: energy exceeds eps0 (hypothesis violated)");
  double half = 0.5 * g.spec().outer;
  p.sup_distance = 0.0;
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    double x, y;
    g.node_coords(idx, x, y);
    if (x * x + y * y > half * half) continue;
    p.sup_distance = std::max(p.sup_distance, std::abs(1.0 - u.norm_at(idx)));
  }
  p.ratio = p.energy > 0 ? p.sup_distance / std::sqrt(p.energy) : 0.0;
  return p;
}

EnergyGapReport energy_gap_probe(const std::vector<const MapField*>& candidates,
                                 double eps1) {
  EnergyGapReport rep;
  rep.gap_regime = true;
  rep.constant_like = true;
  rep.min_nonconstant_energy = std::numeric_limits<double>::infinity();
  for (const MapField* u : candidates) {
    const Grid& g = u->grid();
    EnergyGapCandidate c{};
    c.window_radius = g.spec().outer;
    c.energy = dirichlet_energy(*u);
    Gradient grad = gradient(*u);
    double half = 0.5 * c.window_radius;
    for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
      if (g.node_class(idx) == NodeClass::outside) continue;
      double x, y;
      g.node_coords(idx, x, y);
      if (x * x + y * y > half * half) continue;
      c.sup_gradient_inner = std::max(c.sup_gradient_inner, std::sqrt(grad.sq_norm_at(idx)));
    }
    if (c.energy > eps1) rep.gap_regime = false;
    if (c.energy > 1e-10) {
      rep.constant_like = false;
      rep.min_nonconstant_energy = std::min(rep.min_nonconstant_energy, c.energy);
    }
    rep.candidates.push_back(c);
  }
  return rep;
}

}  // namespace fbh

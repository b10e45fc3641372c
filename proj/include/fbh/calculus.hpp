#pragma once

#include <functional>
#include <optional>

#include "fbh/field.hpp"

namespace fbh {

using RegionPred = std::function<bool(double, double)>;

/// Per-node partials of every component: gx/gy are fields with the same
/// dim as the source. Centered differences inside, one-sided second order
/// where a neighbour is missing.
struct Gradient {
  MapField gx;
  MapField gy;
  double sq_norm_at(std::size_t idx) const {
    double s = 0.0;
    for (int c = 0; c < gx.dim(); ++c)
      s += gx(idx, c) * gx(idx, c) + gy(idx, c) * gy(idx, c);
    return s;
  }
};

Gradient gradient(const MapField& f);

/// E(f, region) = \int_region |grad f|^2 with cut-cell quadrature. The
/// whole grid domain when no region is given. Throws on an empty region.
double dirichlet_energy(const MapField& f,
                        const std::optional<RegionPred>& region = std::nullopt);

/// Same but with region cells weighted by their sub-sampled inside fraction;
/// slower, used where region boundary accuracy matters (disc energies).
double dirichlet_energy_fractional(const MapField& f, const RegionPred& region);

/// One boundary node of the chain with its outward normal, quadrature
/// weight (length units) and flux density u . d_nu u.
struct BoundaryFlux {
  std::size_t idx;
  double nx, ny;     // outward normal
  double weight;     // boundary length weight
  double density;    // u . d_nu u
};

/// Flux densities on every boundary node (flat segment and circle arcs).
/// Normal derivatives use one-sided second-order differences along the
/// inward normal (interpolated samples on arcs).
std::vector<BoundaryFlux> boundary_flux_density(const MapField& f);

/// \oint u . d_nu u over the whole boundary chain.
double boundary_flux_integral(const MapField& f);

/// d_nu u at a flat-boundary node (nu = (0,-1)), one-sided second order.
void flat_normal_derivative(const MapField& f, std::size_t idx, std::span<double> out);

}  // namespace fbh

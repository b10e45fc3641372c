#pragma once

#include <string>

#include "fbh/calculus.hpp"
#include "fbh/logpolar.hpp"

namespace fbh {

struct IdentityReport {
  std::string name;
  std::vector<double> at;        // radius (or node coordinate) per entry
  std::vector<double> mismatch;  // absolute mismatch per entry
  double max_mismatch = 0.0;
  double rms_mismatch = 0.0;
  double grid_h = 0.0;

  void finalize();
};

/// Both parts of the free-boundary condition on I:
///  sup_I ||u| - 1| and ||P_tan d_nu u||_{L2(I)} (one-sided second order).
struct FreeBoundaryResidual {
  double sup_modulus_defect;
  double tangential_norm;
};
FreeBoundaryResidual free_boundary_residual(const MapField& u);

/// Per-radius comparison of the angular and radial half-circle energies
/// \oint |grad_theta u|^2 vs \oint |grad_r u|^2 on half circles around
/// center (on y = 0). Circle integrals use the log-polar resampling.
IdentityReport pohozaev_check(const MapField& u, const std::vector<double>& radii,
                              double center_x = 0.0, int ntheta = 257);

struct SphereDistanceProbe {
  double energy;        // ||grad u||^2 on the half disc
  double sup_distance;  // sup over the inner half disc of |1 - |u||
  double ratio;         // sup_distance / sqrt(energy)
  bool hypothesis_ok;   // energy <= eps0
};
/// Claim-style distance probe: d(u, S^n) <= C sqrt(eps) on the inner half
/// disc. Throws if the energy hypothesis energy <= eps0 fails.
SphereDistanceProbe sphere_distance_probe(const MapField& u, double eps0 = 0.05);

struct EnergyGapCandidate {
  double window_radius;
  double energy;
  double sup_gradient_inner;  // sup |grad u| on the half-window of half radius
};
struct EnergyGapReport {
  std::vector<EnergyGapCandidate> candidates;
  bool gap_regime;       // all energies <= eps1
  bool constant_like;    // all energies ~ 0
  double min_nonconstant_energy;
};
/// Windows R of converged half-plane solves: nonconstant candidates must
/// carry energy approaching 2*pi; small-energy candidates show the C0/R
/// gradient decay of the gap regime.
EnergyGapReport energy_gap_probe(const std::vector<const MapField*>& candidates,
                                 double eps1);

}  // namespace fbh

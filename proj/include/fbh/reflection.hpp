#pragma once

#include <memory>

#include "fbh/calculus.hpp"
#include "fbh/laplace.hpp"

namespace fbh {

/// Compactly supported tensor-product quartic-spline bumps used as the
/// weak-formulation test space.
struct BumpFunction {
  double cx, cy, scale;
  double value(double x, double y) const;
  void grad(double x, double y, double& gx, double& gy) const;
};

struct TestFunctionBank {
  std::vector<BumpFunction> bumps;
  /// scales x a grid of centers, every support strictly inside the disc of
  /// the given radius (minus margin).
  static TestFunctionBank cover_disc(double radius, int centers_per_axis = 5,
                                     std::initializer_list<double> scales = {0.15, 0.3, 0.5});
};

/// The sphere-inversion symmetrized system on the doubled domain:
/// u_tilde, the coefficient A (1 above, 1/|u~|^2 below) and the
/// antisymmetric fields X_{i,j} (0 above). X is stored fully; the
/// antisymmetry X_{i,j} = -X_{j,i} holds exactly by construction.
struct SymmetrizedSystem {
  std::shared_ptr<Grid> grid;  // doubled domain
  MapField u_tilde;
  ScalarField A;
  std::vector<MapField> X;  // (n+1)^2 two-component fields, row-major (i,j)
  double min_upper_modulus;  // min |u| over the source half domain
  double max_Ainv, min_A, max_A;

  int dim() const { return u_tilde.dim(); }
  const MapField& Xij(int i, int j) const { return X[i * dim() + j]; }
};

/// Reflection across I by the sphere inversion. Requires min |u| >= 1/2 on
/// the half domain (the small-energy hypothesis); the error names the
/// violating node.
SymmetrizedSystem symmetrize(const MapField& u);

struct ResidualStats {
  double max_abs = 0.0;
  double rms = 0.0;
  int count = 0;
  void add(double v);
};

/// Weak residual of -div(A grad u~_j) = sum_i <X_{i,j}, grad u~_i> against
/// every bump and every component j.
ResidualStats weak_residual_div_form(const SymmetrizedSystem& s, const TestFunctionBank& bank);

struct DivFreeStats {
  ResidualStats weak_divergence;  // against scalar bumps
  ResidualStats circle_flux;      // \oint <X, nu> per radius and (i,j)
};
DivFreeStats divfree_check(const SymmetrizedSystem& s, const TestFunctionBank& bank,
                           const std::vector<double>& circle_radii);

struct StreamFunctionResult {
  ScalarField B;
  double defect_l2;  // ||grad_perp B - X||_{L2}
};
/// Recovers B with grad_perp B = X on a full disc by a gauged Poisson
/// solve (Delta B = rot X, boundary values from the tangential line
/// integral). Throws when the boundary circulation of X is too large for a
/// single-valued stream function.
StreamFunctionResult stream_function(const MapField& X, double gauge_x, double gauge_y,
                                     double flux_threshold = 0.1);

struct KelvinExtension {
  std::shared_ptr<Grid> grid;  // the full disc grid, owned here
  MapField extended;           // lives on *grid
  double energy_ratio;         // ||grad ext||_{L2(D)} / ||grad f||_{L2(D \ D_lambda)}
};
/// Inward Kelvin-type extension f(z) -> f(z lam^2/|z|^2) * cutoff of an
/// annulus field across the inner hole.
KelvinExtension kelvin_extend_inward(const MapField& f, double lambda);

/// eps bookkeeping: eps2 = 1/(4*96*K0^2), eps1 = eps2/17.
struct EpsilonConstants {
  double K0, eps2, eps1;
};
EpsilonConstants epsilon_constants(double K0);

/// Reflection energy identity pieces: lower-half energy and the weighted
/// upper-half integral \int |grad u~|^2 / |u~|^4.
struct ReflectionEnergy {
  double lower;
  double upper_weighted;
  double upper;
};
ReflectionEnergy reflection_energy_identity(const SymmetrizedSystem& s);

}  // namespace fbh

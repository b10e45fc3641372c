#pragma once

#include <memory>
#include <optional>

#include "fbh/fb_solver.hpp"
#include "fbh/identities.hpp"

namespace fbh {

/// One concentrating bubble of a gluing family: a closed-form profile
/// placed at a fixed center on I with the geometric scale schedule
/// lambda_m = lambda0 * 4^{-m}.
struct BubbleSpec {
  HalfPlaneBubble profile;
  double center = 0.0;
  double lambda0 = 0.25;

  double scale(int m) const;
};

/// Synthetic concentrating family: a base profile (constant by default, or
/// a fixed half-plane profile) plus cutoff-glued rescaled bubbles.
struct GluingFamily {
  int dim = 3;
  std::vector<double> base_constant;            // unit vector when used
  std::optional<HalfPlaneBubble> base_profile;  // overrides the constant
  std::vector<BubbleSpec> bubbles;
  double cutoff_c = 2.0;  // blend annulus [sqrt(l)/c, c*sqrt(l)]

  /// Base value only (no bubbles).
  void base_value(double x, double y, std::span<double> out) const;
  /// Checks the schedule and support invariants at index m; throws with
  /// the offending pair on overlap.
  void validate(int m, double outer) const;
};

/// Pointwise glued value (blended in the ball, clipped to the closed
/// ball); the analytic form behind glue_family, also used for arc data.
void family_value(const GluingFamily& f, int m, double x, double y, std::span<double> out);

/// The glued field on a half-disc grid; flat-boundary values renormalized
/// onto the sphere. Approximately harmonic only ("synthetic").
MapField glue_family(const GluingFamily& f, int m, const Grid& g);

/// Genuine discrete free-boundary solve seeded by the glue: arc data and
/// initial trace from family_value. Non-convergence is reported in the
/// SolveReport, not thrown.
SolveResult harmonize_family(const GluingFamily& f, int m, const LaplaceSolver& solver,
                             const SolverConfig& cfg = {});

struct ConcentrationReport {
  std::vector<double> points;         // x on I, one per detected cluster
  std::vector<double> ball_energies;  // energy in B(point, r_min) at the last index
  std::vector<double> interior_x, interior_y;  // interior hotspot diagnostics
};
/// Flat-boundary points whose smallest scanned ball persistently (last two
/// indices) carries energy above eps. Needs >= 2 family indices.
ConcentrationReport detect_concentration(const std::vector<const MapField*>& u_ms,
                                         double eps, const std::vector<double>& radii);

/// The blow-up scale: the largest lambda with
/// \int_{D+_{r_i}(a) \ D+_lambda(a)} |grad u|^2 = eps1/2, by bisection on
/// the log-polar annulus energy. Throws "no concentration at a" when even
/// the deepest annulus stays below eps1/2.
double select_scale(const MapField& u, double a, double r_i, double eps1);

struct ExtractedBubble {
  std::shared_ptr<Grid> grid;  // the window grid, owned here
  MapField window;             // u(a + lambda x) on the half disc of radius R
  bool has_bubble = false;
  int degree = 0;
  std::vector<double> plane_e1, plane_e2;  // fitted target 2-plane
  double energy = 0.0;
  double plane_residual = 0.0;  // off-plane variance fraction
};
/// Rescaled window plus a fitted closed-form bubble: degree from the
/// winding number of the flat trace, plane from the top-2 principal
/// directions of the image cloud. Near-zero energy is classified as
/// "no bubble" rather than fitted.
ExtractedBubble rescale_extract(const MapField& u, double a, double lambda, double R,
                                int nodes_per_diameter = 129);

struct NeckRow {
  double R;
  double delta;           // max over the annulus of |z - a| |grad u|
  double energy;          // \int_A |grad u|^2
  double l2weak;          // L^{2,inf} of |grad u| on A
  double l21theta;        // L^{2,1} of |grad_theta u| on A
  double flux;            // \int_{I_{m,R}} u . d_nu u
  double pohozaev_ratio;  // energy / (2 * angular energy); 1 for harmonic
};
/// Neck annuli D+_{1/R}(a) \ D+_{lambda R}(a) for each R. Throws when an
/// annulus collapses (lambda R >= 1/R).
std::vector<NeckRow> neck_scan(const MapField& u, double a, double lambda,
                               const std::vector<double>& Rs);

struct MeasureCheck {
  std::vector<double> residual_flux;  // per m: \oint R_m . d_nu R_m over I
  // per test function, per m: |<mu_m, psi> - <mu_inf, psi> - sum e_i psi(a_i)|
  std::vector<std::vector<double>> psi_defects;
};
/// Residual R_m = u_m - u_base - sum (bubble - its value at infinity) and
/// the boundary-measure convergence defects. u_base is the zero-bubble
/// solve on the same grid; energies/centers describe the extraction.
MeasureCheck residual_and_measure_check(
    const GluingFamily& f, const std::vector<int>& ms,
    const std::vector<const MapField*>& u_ms, const MapField& u_base,
    const std::vector<double>& bubble_energies, const std::vector<double>& bubble_centers,
    const std::vector<std::function<double(double)>>& psis);

struct QuantizationRow {
  double energy;
  int k;       // nearest multiple of 2*pi (>= 1 when energy > pi)
  double gap;  // |energy - 2 pi k| / (2 pi)
};
std::vector<QuantizationRow> quantization_report(const std::vector<double>& energies);

}  // namespace fbh

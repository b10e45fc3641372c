#pragma once

#include <optional>
#include <string>

#include "fbh/laplace.hpp"
#include "fbh/lorentz.hpp"
#include "fbh/reflection.hpp"

namespace fbh {

/// Poisson problem with a Jacobian right-hand side <grad_perp a, grad b>
/// and zero Dirichlet data, on a disc or annulus.
struct WenteProblem {
  ScalarField a;
  ScalarField b;
};

struct WenteSolution {
  ScalarField phi;
  double grad_l2;
  double sup_abs;
  double grad_l21;  // meaningful on annuli (and discs); rearrangement norm
};

/// The Jacobian a_x b_y - a_y b_x assembled with the shared stencils.
ScalarField jacobian_rhs(const ScalarField& a, const ScalarField& b);

WenteSolution wente_solve(const WenteProblem& p, const LaplaceSolver& solver);
WenteSolution wente_solve(const WenteProblem& p);

struct WenteRatioSample {
  double ratio_grad;  // ||grad phi||_2 / (||grad a||_2 ||grad b||_2)
  double ratio_sup;   // ||phi||_inf / (...)
  double ratio_l21;   // ||grad phi||_{2,1} / (...)
};

struct WenteConstants {
  double K0 = 0.0;  // sup of ratio_grad (disc bank)
  double K1 = 0.0;  // sup of ratio_l21 (annulus bank)
  double K2 = 0.0;  // angular-estimate probe sup
  double Kinf = 0.0;  // sup of ratio_sup, recorded alongside
  int grid = 0;
  std::string bank_hash;
  double eps2 = 0.0, eps1 = 0.0;
};

/// Ratio probe over a sample bank; the running sup is the working constant.
/// Throws if a sample has ||grad a|| ||grad b|| = 0.
std::vector<WenteRatioSample> wente_ratio_probe(const std::vector<WenteProblem>& samples,
                                                const LaplaceSolver& solver);

/// Deterministic trigonometric sample bank on the given grid.
std::vector<WenteProblem> random_trig_bank(const Grid& g, int count, unsigned seed);

/// Runs the disc (K0) and annulus (K1) banks at the given resolution and
/// fills eps2 = 1/(4*96*K0^2), eps1 = eps2/17.
WenteConstants measure_constants(int nodes_per_diameter, int bank_size, unsigned seed);

void write_constants_json(std::ostream& os, const WenteConstants& c);
WenteConstants read_constants_json(std::istream& is);

/// total = harmonic_part + potential_part, potential vanishing on the
/// boundary: the potential solves the (discrete) Poisson problem with the
/// Laplacian of the input as right-hand side, so splitting is an exact
/// projection at the discrete level.
struct HodgeDecomposition {
  MapField total;
  MapField harmonic_part;
  MapField potential_part;
};
HodgeDecomposition hodge_split(const MapField& D, const LaplaceSolver& solver);
HodgeDecomposition hodge_split(const MapField& D);

struct DecayCheck {
  double ratio;  // ||grad v||_{L2(D_{r/16})} / ||grad v||_{L2(D_r)}
  bool degenerate;  // constant input (0/0 guarded as ratio 0)
};
/// The 1/16 harmonic gradient-decay lemma, probed on concentric discs
/// centred at the origin.
DecayCheck harmonic_decay_check(const MapField& v, double r);

struct AngularEstimate {
  double lhs_l21;       // ||grad_theta v||_{L^{2,1}} on D_{1/2} \ D_{2 lambda}
  double grad_D_sq;     // ||grad D||^2 on the annulus
  double grad_u_sq;     // ||grad u~||^2 on the annulus
  double measured_K2;   // lhs / sqrt(2 (grad_D_sq + grad_u_sq))
  double d0_log_coeff;  // magnitude of the log coefficient of the harmonic part
};
/// Assembles the D / psi / v chain of the neck estimate on a symmetrized
/// annulus system and measures the K2 of the angular bound.
AngularEstimate angular_estimate_probe(const SymmetrizedSystem& s, double lambda);

}  // namespace fbh

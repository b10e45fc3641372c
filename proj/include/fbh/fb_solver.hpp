#pragma once

#include <functional>

#include "fbh/bubble.hpp"
#include "fbh/calculus.hpp"
#include "fbh/laplace.hpp"

namespace fbh {

/// Dirichlet closure data evaluated on the curved arc.
using ArcData = std::function<void(double x, double y, std::span<double> out)>;

struct SolverConfig {
  double step = 0.25;        // initial descent step
  double armijo = 0.5;       // backtracking factor in (0,1)
  double tol_tangent = 1e-6; // stop when ||P_tan flux||_{L2(I)} falls below
  int max_iters = 500;
  double linear_tol = 1e-12; // inner solve tolerance (direct solver: reported only)
  double step_cap = 64.0;    // guard against projecting through the origin

  void validate() const;
};

struct SolveReport {
  int iterations = 0;
  double tangential_residual = 0.0;
  double energy = 0.0;                 // quadrature Dirichlet energy of the result
  std::vector<double> energy_history;  // discrete energy after each accepted step
  bool converged = false;
  int thread_count = 1;
};

/// Discrete harmonic extension of full Dirichlet data (all boundary nodes
/// of `data` are used). Convenience wrapper over LaplaceSolver.
MapField harmonic_solve(const MapField& dirichlet_data, const LaplaceSolver& solver);
MapField harmonic_solve(const MapField& dirichlet_data);

/// The discrete Dirichlet form matching the five-point solve (edge sum,
/// boundary-row edges at half weight). The descent minimises this exactly.
double discrete_energy(const MapField& u);

/// Exact gradient of discrete_energy with respect to the trace value at a
/// flat-boundary node, scaled by 1/(2h).
void trace_flux(const MapField& u, std::size_t flat_idx, std::span<double> out);

struct SolveResult {
  MapField field;
  SolveReport report;
};

/// Projected gradient descent on the S^n-valued flat-boundary trace with
/// Armijo backtracking (Barzilai-Borwein trial steps). Stops when the
/// tangential part of the discrete normal flux on I drops below
/// tol_tangent; non-convergence is reported, not thrown.
/// init_trace: dim values per flat node, unit modulus required.
SolveResult solve_free_boundary(const LaplaceSolver& solver, const ArcData& arc_data,
                                std::vector<double> init_trace, int dim,
                                const SolverConfig& cfg);

/// One explicit projected step: normalize(trace - step * P_tan(flux)).
/// Throws if the step would project a near-zero vector.
std::vector<double> descent_step(const LaplaceSolver& solver, const ArcData& arc_data,
                                 std::span<const double> trace, int dim, double step);

}  // namespace fbh

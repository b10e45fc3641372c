#pragma once

#include <memory>

#include "fbh/field.hpp"

namespace fbh {

/// Five-point Dirichlet Laplace/Poisson solver on a masked grid. Unknowns
/// are the interior nodes; arc and flat-boundary nodes carry Dirichlet
/// data. The factorisation is computed once per grid and reused across
/// right-hand sides (the free-boundary descent re-solves every step).
class LaplaceSolver {
 public:
  explicit LaplaceSolver(const Grid& g);
  ~LaplaceSolver();
  LaplaceSolver(LaplaceSolver&&) noexcept;
  LaplaceSolver& operator=(LaplaceSolver&&) noexcept;

  const Grid& grid() const;

  /// Harmonic extension: interior solves the discrete Laplace equation,
  /// boundary values copied from `boundary_data`.
  MapField solve_laplace(const MapField& boundary_data) const;

  /// Poisson: Delta u = rhs in the interior, u = boundary_data on the
  /// boundary. rhs has the same dim as boundary_data.
  MapField solve_poisson(const MapField& rhs, const MapField& boundary_data) const;

  /// Exact gradient of the edge-based Dirichlet energy
  /// sum_edges (u_a - u_b)^2 with respect to the value at node idx,
  /// divided by 2h (so it is consistent with a normal-derivative density).
  void energy_gradient_at(const MapField& u, std::size_t idx, std::span<double> out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fbh

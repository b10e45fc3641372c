#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "fbh/field.hpp"
#include "fbh/laplace.hpp"

namespace fbh {

using Complex = std::complex<double>;

/// Finite Blaschke product with the given zeros (all of modulus < 1).
Complex blaschke(const std::vector<Complex>& zeros, Complex z);
Complex blaschke_derivative(const std::vector<Complex>& zeros, Complex z);

/// Conformal map from the closed upper half plane onto the closed disc,
/// f(z) = (z - i)/(z + i).
Complex halfplane_to_disc(Complex z);

/// Closed-form equatorial-disc bubble: a Blaschke product composed into a
/// 2-plane of R^{n+1}, optionally followed by a rigid rotation of the
/// target. Image lies in span{e1,e2} intersected with the closed unit ball
/// and the boundary trace is sphere-valued.
class AnalyticBubble {
 public:
  /// rotation: row-major (n+1)x(n+1) orthogonal matrix, empty = identity.
  AnalyticBubble(std::vector<Complex> zeros, std::vector<double> e1,
                 std::vector<double> e2, std::vector<double> rotation = {});

  /// Degree-k bubble z -> z^k into the (e0,e1) coordinate plane of R^{n+1}.
  static AnalyticBubble canonical(int degree, int ambient_dim_n = 2);

  int degree() const { return (int)zeros_.size(); }
  int ambient_dim() const { return (int)e1_.size() - 1; }  // the n of S^n
  const std::vector<Complex>& zeros() const { return zeros_; }
  const std::vector<double>& plane_e1() const { return e1_; }
  const std::vector<double>& plane_e2() const { return e2_; }

  void eval(Complex z, std::span<double> out) const;
  std::vector<double> eval(Complex z) const;

  /// Exact energy 2*pi*degree of the bubble on the disc.
  double analytic_energy() const;
  /// Independent quadrature check of the energy on a sampled grid.
  double quadrature_energy(int nodes_per_diameter = 129) const;

 private:
  std::vector<Complex> zeros_;
  std::vector<double> e1_, e2_, rot_;
};

/// An AnalyticBubble precomposed with f(z) = (z-i)/(z+i): a harmonic map
/// with free boundary on the upper half plane whose trace on R x {0} is
/// the 1/2-harmonic map.
class HalfPlaneBubble {
 public:
  explicit HalfPlaneBubble(AnalyticBubble b) : bubble_(std::move(b)) {}
  const AnalyticBubble& underlying() const { return bubble_; }
  int ambient_dim() const { return bubble_.ambient_dim(); }

  void eval(Complex z, std::span<double> out) const;
  std::vector<double> eval(Complex z) const;
  /// Limit value at z -> infinity (the Blaschke product at 1).
  std::vector<double> value_at_infinity() const;

 private:
  AnalyticBubble bubble_;
};

/// Pointwise evaluation on every lattice node of g; tagged ball-valued.
MapField sample_bubble(const AnalyticBubble& b, const Grid& g);
MapField sample_bubble(const HalfPlaneBubble& b, const Grid& g);

/// Discrete-harmonic extension of a flat-boundary trace into a half
/// domain; the curved-arc closure data must be supplied (the bounded
/// domain does not determine the solution from the trace alone).
/// flat_trace holds dim values per flat-boundary node, in grid order.
MapField poisson_extend(const LaplaceSolver& solver,
                        std::span<const double> flat_trace, int dim,
                        const std::function<void(double, double, std::span<double>)>& arc_closure);

}  // namespace fbh

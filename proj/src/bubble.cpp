#include "fbh/bubble.hpp"

#include <cmath>

#include "fbh/calculus.hpp"

namespace fbh {

Complex blaschke(const std::vector<Complex>& zeros, Complex z) {
  Complex w(1.0, 0.0);
  for (Complex a : zeros) w *= (z - a) / (1.0 - std::conj(a) * z);
  return w;
}

Complex blaschke_derivative(const std::vector<Complex>& zeros, Complex z) {
  // product rule: B'(z) = B(z) * sum_k f_k'(z)/f_k(z) away from zeros;
  // assemble factor-wise to stay finite at the zeros.
  Complex d(0.0, 0.0);
  for (std::size_t k = 0; k < zeros.size(); ++k) {
    Complex fk = (1.0 - std::norm(zeros[k]));  // numerator of f_k'
    Complex den = 1.0 - std::conj(zeros[k]) * z;
    Complex term = fk / (den * den);
    for (std::size_t l = 0; l < zeros.size(); ++l) {
      if (l == k) continue;
      term *= (z - zeros[l]) / (1.0 - std::conj(zeros[l]) * z);
    }
    d += term;
  }
  return d;
}

Complex halfplane_to_disc(Complex z) {
  const Complex i(0.0, 1.0);
  if (std::abs(z + i) < 1e-14) throw std::invalid_argument("halfplane_to_disc: pole at z = -i");
  return (z - i) / (z + i);
}

AnalyticBubble::AnalyticBubble(std::vector<Complex> zeros, std::vector<double> e1,
                               std::vector<double> e2, std::vector<double> rotation)
    : zeros_(std::move(zeros)), e1_(std::move(e1)), e2_(std::move(e2)), rot_(std::move(rotation)) {
  if (zeros_.empty()) throw std::invalid_argument("AnalyticBubble: degree must be >= 1");
  for (Complex a : zeros_)
    if (std::abs(a) >= 1.0) throw std::invalid_argument("AnalyticBubble: Blaschke zero with |a| >= 1");
  if (e1_.size() != e2_.size() || e1_.size() < 3)
    throw std::invalid_argument("AnalyticBubble: plane vectors must live in R^{n+1}, n >= 2");
  double n1 = 0, n2 = 0, dot = 0;
  for (std::size_t c = 0; c < e1_.size(); ++c) {
    n1 += e1_[c] * e1_[c];
    n2 += e2_[c] * e2_[c];
    dot += e1_[c] * e2_[c];
  }
  if (std::abs(n1 - 1.0) > 1e-10 || std::abs(n2 - 1.0) > 1e-10 || std::abs(dot) > 1e-10)
    throw std::invalid_argument("AnalyticBubble: plane vectors must be orthonormal");
  if (!rot_.empty() && rot_.size() != e1_.size() * e1_.size())
    throw std::invalid_argument("AnalyticBubble: rotation has wrong shape");
}

AnalyticBubble AnalyticBubble::canonical(int degree, int n) {
  if (degree < 1) throw std::invalid_argument("AnalyticBubble: degree must be >= 1");
  std::vector<Complex> zeros(degree, Complex(0.0, 0.0));
  std::vector<double> e1(n + 1, 0.0), e2(n + 1, 0.0);
  e1[0] = 1.0;
  e2[1] = 1.0;
  return AnalyticBubble(std::move(zeros), std::move(e1), std::move(e2));
}

void AnalyticBubble::eval(Complex z, std::span<double> out) const {
  Complex w = blaschke(zeros_, z);
  const std::size_t d = e1_.size();
  if (rot_.empty()) {
    for (std::size_t c = 0; c < d; ++c) out[c] = w.real() * e1_[c] + w.imag() * e2_[c];
  } else {
    for (std::size_t c = 0; c < d; ++c) {
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        v += rot_[c * d + k] * (w.real() * e1_[k] + w.imag() * e2_[k]);
      out[c] = v;
    }
  }
}

std::vector<double> AnalyticBubble::eval(Complex z) const {
  std::vector<double> out(e1_.size());
  eval(z, out);
  return out;
}

double AnalyticBubble::analytic_energy() const { return 2.0 * M_PI * degree(); }

double AnalyticBubble::quadrature_energy(int nodes_per_diameter) const {
  // |grad u|^2 = 2 |B'(z)|^2 for a holomorphic B into a flat 2-plane.
  DomainSpec spec{DomainKind::full_disc, 0.0, 1.0, nodes_per_diameter};
  Grid g(spec);
  double e = 0.0;
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    double x, y;
    g.node_coords(idx, x, y);
    Complex dB = blaschke_derivative(zeros_, Complex(x, y));
    e += 2.0 * std::norm(dB) * g.cell_area(idx);
  }
  return e;
}

void HalfPlaneBubble::eval(Complex z, std::span<double> out) const {
  bubble_.eval(halfplane_to_disc(z), out);
}

std::vector<double> HalfPlaneBubble::eval(Complex z) const {
  std::vector<double> out(bubble_.ambient_dim() + 1);
  eval(z, out);
  return out;
}

std::vector<double> HalfPlaneBubble::value_at_infinity() const {
  return bubble_.eval(Complex(1.0, 0.0));
}

namespace {

template <typename B>
MapField sample_impl(const B& b, const Grid& g, int dim) {
  MapField f(g, dim, /*ball_valued=*/true);
  for (int j = g.jmin(); j <= g.half_extent(); ++j) {
    for (int i = -g.half_extent(); i <= g.half_extent(); ++i) {
      std::size_t idx = g.index(i, j);
      b.eval(Complex(g.x(i), g.y(j)), f.at(idx));
    }
  }
  return f;
}

}  // namespace

MapField sample_bubble(const AnalyticBubble& b, const Grid& g) {
  // keep clear of Blaschke poles at 1/conj(a)
  double pole_r = 1e30;
  for (Complex a : b.zeros())
    if (std::abs(a) > 1e-14) pole_r = std::min(pole_r, 1.0 / std::abs(a));
  double corner = g.spec().outer * std::sqrt(2.0);
  if (corner >= pole_r - 1e-9)
    throw std::invalid_argument("sample_bubble: grid reaches a Blaschke pole");
  return sample_impl(b, g, b.ambient_dim() + 1);
}

MapField sample_bubble(const HalfPlaneBubble& b, const Grid& g) {
  if (g.jmin() < 0 && g.y(g.jmin()) <= -0.5)
    throw std::invalid_argument("sample_bubble: half-plane bubble sampled near its pole z = -i");
  return sample_impl(b, g, b.ambient_dim() + 1);
}

MapField poisson_extend(const LaplaceSolver& solver, std::span<const double> flat_trace,
                        int dim,
                        const std::function<void(double, double, std::span<double>)>& arc_closure) {
  const Grid& g = solver.grid();
  if (!g.spec().is_half())
    throw std::invalid_argument("poisson_extend: target must be a half domain");
  const auto& flat = g.flat_boundary();
  if (flat_trace.size() != flat.size() * (std::size_t)dim)
    throw std::invalid_argument("poisson_extend: trace length does not match flat-boundary nodes");

  MapField bdata(g, dim);
  for (std::size_t k = 0; k < flat.size(); ++k)
    for (int c = 0; c < dim; ++c) bdata(flat[k], c) = flat_trace[k * dim + c];
  for (std::size_t idx : g.arc_boundary()) {
    double x, y;
    g.node_coords(idx, x, y);
    arc_closure(x, y, bdata.at(idx));
  }
  return solver.solve_laplace(bdata);
}

}  // namespace fbh

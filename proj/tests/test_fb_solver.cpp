#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fbh/bubble.hpp"
#include "fbh/calculus.hpp"
#include "fbh/fb_solver.hpp"
#include "fbh/identities.hpp"

using namespace fbh;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> bubble_trace(const Grid& g, const HalfPlaneBubble& hb) {
  std::vector<double> trace;
  for (std::size_t idx : g.flat_boundary()) {
    double x, y;
    g.node_coords(idx, x, y);
    auto v = hb.eval(Complex(x, y));
    trace.insert(trace.end(), v.begin(), v.end());
  }
  return trace;
}

}  // namespace

TEST_CASE("solver config: invalid parameters are rejected") {
  SolverConfig bad;
  bad.step = -1.0;
  CHECK_THROWS(bad.validate());
  bad = SolverConfig{};
  bad.armijo = 1.5;
  CHECK_THROWS(bad.validate());
  bad = SolverConfig{};
  bad.max_iters = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("harmonic solve: constant boundary data stays constant") {
  Grid g(DomainSpec{DomainKind::half_disc, 0.0, 1.0, 65});
  MapField bc(g, 2);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) { bc(idx, 0) = 0.3; bc(idx, 1) = -0.1; }
  MapField u = harmonic_solve(bc);
  for (std::size_t idx : g.interior()) {
    CHECK(u(idx, 0) == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(u(idx, 1) == doctest::Approx(-0.1).epsilon(1e-10));
  }
}

TEST_CASE("harmonic solve: Re z^3 is reproduced at second order") {
  double errs[2];
  int k = 0;
  for (int n : {65, 129}) {
    Grid g(DomainSpec{DomainKind::full_disc, 0.0, 1.0, n});
    MapField bc(g, 1);
    for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
      double x, y;
      g.node_coords(idx, x, y);
      bc(idx, 0) = x * x * x - 3 * x * y * y;
    }
    MapField u = harmonic_solve(bc);
    double worst = 0.0;
    for (std::size_t idx : g.interior()) {
      double x, y;
      g.node_coords(idx, x, y);
      worst = std::max(worst, std::abs(u(idx, 0) - (x * x * x - 3 * x * y * y)));
    }
    errs[k++] = worst;
  }
  // cubic harmonics are in the kernel of the five-point stencil exactly
  CHECK(errs[0] < 1e-12);
  CHECK(errs[1] < 1e-12);
}

TEST_CASE("harmonic solve: discrete maximum principle for random data") {
  Grid g(DomainSpec{DomainKind::full_disc, 0.0, 1.0, 65});
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  MapField bc(g, 1);
  for (std::size_t idx : g.arc_boundary()) bc(idx, 0) = U(rng);
  MapField u = harmonic_solve(bc);
  double bmin = 1e300, bmax = -1e300;
  for (std::size_t idx : g.arc_boundary()) { bmin = std::min(bmin, bc(idx, 0)); bmax = std::max(bmax, bc(idx, 0)); }
  for (std::size_t idx : g.interior()) {
    CHECK(u(idx, 0) <= bmax + 1e-12);
    CHECK(u(idx, 0) >= bmin - 1e-12);
  }
}

TEST_CASE("discrete energy gradient: trace_flux matches finite differences") {
  Grid g(DomainSpec{DomainKind::half_disc, 0.0, 1.0, 33});
  MapField u(g, 2);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) { u(idx, 0) = U(rng); u(idx, 1) = U(rng); }
  double h = g.h();
  std::size_t probe = g.flat_boundary()[g.flat_boundary().size() / 3];
  double fx[2];
  trace_flux(u, probe, fx);
  for (int c = 0; c < 2; ++c) {
    double delta = 1e-6;
    MapField up = u, um = u;
    up(probe, c) += delta;
    um(probe, c) -= delta;
    double fd = (discrete_energy(up) - discrete_energy(um)) / (2 * delta);
    // trace_flux is the energy gradient scaled by 1/(2h)
    CHECK(fx[c] == doctest::Approx(fd / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("descent step: zero step is the identity on the trace") {
  Grid g(DomainSpec{DomainKind::half_disc, 0.0, 1.0, 33});
  LaplaceSolver solver(g);
  HalfPlaneBubble hb(AnalyticBubble::canonical(1, 2));
  auto trace = bubble_trace(g, hb);
  auto arc = [&](double x, double y, std::span<double> o) { hb.eval(Complex(x, y), o); };
  auto stepped = descent_step(solver, arc, trace, 3, 0.0);
  for (std::size_t k = 0; k < trace.size(); ++k)
    CHECK(stepped[k] == doctest::Approx(trace[k]).epsilon(1e-14));
}

TEST_CASE("descent step: keeps the trace on the sphere") {
  Grid g(DomainSpec{DomainKind::half_disc, 0.0, 1.0, 33});
  LaplaceSolver solver(g);
  HalfPlaneBubble hb(AnalyticBubble::canonical(1, 2));
  auto trace = bubble_trace(g, hb);
  auto arc = [&](double x, double y, std::span<double> o) { hb.eval(Complex(x, y), o); };
  auto stepped = descent_step(solver, arc, trace, 3, 0.2);
  for (std::size_t k = 0; k + 2 < stepped.size(); k += 3) {
    double n = std::sqrt(stepped[k] * stepped[k] + stepped[k + 1] * stepped[k + 1] +
                         stepped[k + 2] * stepped[k + 2]);
    CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("free boundary solve: constant data converges immediately") {
  Grid g(DomainSpec{DomainKind::half_disc, 0.0, 1.0, 65});
  LaplaceSolver solver(g);
  std::vector<double> trace(g.flat_boundary().size() * 3);
  for (std::size_t k = 0; k < g.flat_boundary().size(); ++k) trace[3 * k + 2] = 1.0;
  auto arc = [](double, double, std::span<double> o) { o[0] = 0; o[1] = 0; o[2] = 1; };
  SolverConfig cfg;
  auto res = solve_free_boundary(solver, arc, trace, 3, cfg);
  CHECK(res.report.converged);
  CHECK(res.report.iterations <= 2);
  CHECK(res.report.energy < 1e-10);
}

TEST_CASE("free boundary solve: rejects a non-unit initial trace") {
  Grid g(DomainSpec{DomainKind::half_disc, 0.0, 1.0, 33});
  LaplaceSolver solver(g);
  std::vector<double> trace(g.flat_boundary().size() * 3, 0.0);  // zero vectors
  auto arc = [](double, double, std::span<double> o) { o[0] = 0; o[1] = 0; o[2] = 1; };
  CHECK_THROWS(solve_free_boundary(solver, arc, trace, 3, SolverConfig{}));
}

TEST_CASE("free boundary solve: exact bubble data is a fixed point up to tolerance") {
  Grid g(DomainSpec{DomainKind::half_disc, 0.0, 1.0, 65});
  LaplaceSolver solver(g);
  HalfPlaneBubble hb(AnalyticBubble::canonical(1, 2));
  auto arc = [&](double x, double y, std::span<double> o) { hb.eval(Complex(x, y), o); };
  SolverConfig cfg;
  cfg.tol_tangent = 1e-4;
  auto res = solve_free_boundary(solver, arc, bubble_trace(g, hb), 3, cfg);
  CHECK(res.report.converged);
  CHECK(res.report.tangential_residual <= 1e-4);
  // the solve stays close to the sampled bubble
  MapField exact = sample_bubble(hb, g);
  MapField diff(g, 3);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx)
    for (int c = 0; c < 3; ++c) diff(idx, c) = res.field(idx, c) - exact(idx, c);
  CHECK(std::sqrt(dirichlet_energy(diff)) < 0.05);
  CHECK(res.report.energy == doctest::Approx(dirichlet_energy(exact)).epsilon(0.02));
}

TEST_CASE("free boundary solve: recovers the bubble from a rotated initial trace") {
  Grid g(DomainSpec{DomainKind::half_disc, 0.0, 1.0, 65});
  LaplaceSolver solver(g);
  HalfPlaneBubble hb(AnalyticBubble::canonical(1, 2));
  auto arc = [&](double x, double y, std::span<double> o) { hb.eval(Complex(x, y), o); };
  // perturb the initial trace by a rigid rotation in the (e1,e3) plane
  auto trace = bubble_trace(g, hb);
  double c = std::cos(0.4), s = std::sin(0.4);
  for (std::size_t k = 0; k + 2 < trace.size(); k += 3) {
    double a = trace[k], b = trace[k + 2];
    trace[k] = c * a - s * b;
    trace[k + 2] = s * a + c * b;
  }
  SolverConfig cfg;
  cfg.tol_tangent = 1e-4;
  auto res = solve_free_boundary(solver, arc, trace, 3, cfg);
  CHECK(res.report.converged);
  // the energy returns to that of the bubble restricted to the half disc
  double target = dirichlet_energy(sample_bubble(hb, g));
  CHECK(res.report.energy == doctest::Approx(target).epsilon(0.03));
  FreeBoundaryResidual fb = free_boundary_residual(res.field);
  CHECK(fb.sup_modulus_defect < 1e-10);
}

TEST_CASE("free boundary solve: accepted energies never increase") {
  Grid g(DomainSpec{DomainKind::half_disc, 0.0, 1.0, 65});
  LaplaceSolver solver(g);
  HalfPlaneBubble hb(AnalyticBubble::canonical(1, 2));
  auto arc = [&](double x, double y, std::span<double> o) { hb.eval(Complex(x, y), o); };
  auto trace = bubble_trace(g, hb);
  double c = std::cos(0.3), s = std::sin(0.3);
  for (std::size_t k = 0; k + 2 < trace.size(); k += 3) {
    double a = trace[k + 1], b = trace[k + 2];
    trace[k + 1] = c * a - s * b;
    trace[k + 2] = s * a + c * b;
  }
  auto res = solve_free_boundary(solver, arc, trace, 3, SolverConfig{});
  const auto& hist = res.report.energy_history;
  REQUIRE(hist.size() >= 2);
  for (std::size_t k = 1; k < hist.size(); ++k) CHECK(hist[k] <= hist[k - 1] + 1e-10);
}

TEST_CASE("free boundary solve: result satisfies both boundary conditions") {
  Grid g(DomainSpec{DomainKind::half_disc, 0.0, 1.0, 129});
  LaplaceSolver solver(g);
  HalfPlaneBubble hb(AnalyticBubble::canonical(1, 2));
  auto arc = [&](double x, double y, std::span<double> o) { hb.eval(Complex(x, y), o); };
  SolverConfig cfg;
  cfg.tol_tangent = 1e-5;
  auto res = solve_free_boundary(solver, arc, bubble_trace(g, hb), 3, cfg);
  CHECK(res.report.converged);
  FreeBoundaryResidual fb = free_boundary_residual(res.field);
  CHECK(fb.sup_modulus_defect < 1e-10);
  CHECK(fb.tangential_norm < 5e-3);
}

#include "fbh/fb_solver.hpp"

#include <cmath>

namespace fbh {

void SolverConfig::validate() const {
  if (step <= 0) throw std::invalid_argument("SolverConfig: step must be > 0");
  if (armijo <= 0 || armijo >= 1) throw std::invalid_argument("SolverConfig: armijo must be in (0,1)");
  if (tol_tangent <= 0 || linear_tol <= 0) throw std::invalid_argument("SolverConfig: tolerances must be > 0");
  if (max_iters <= 0) throw std::invalid_argument("SolverConfig: max_iters must be > 0");
}

MapField harmonic_solve(const MapField& data, const LaplaceSolver& solver) {
  return solver.solve_laplace(data);
}

MapField harmonic_solve(const MapField& data) {
  LaplaceSolver solver(data.grid());
  return solver.solve_laplace(data);
}

double discrete_energy(const MapField& u) {
  const Grid& g = u.grid();
  double e = 0.0;
  for (int j = g.jmin(); j <= g.half_extent(); ++j) {
    for (int i = -g.half_extent(); i <= g.half_extent(); ++i) {
      if (!g.in_domain(i, j)) continue;
      bool right = g.in_domain(i + 1, j);
      bool up = g.in_domain(i, j + 1);
      std::size_t idx = g.index(i, j);
      if (right) {
        double w = (g.spec().is_half() && j == 0) ? 0.5 : 1.0;
        std::size_t r = g.index(i + 1, j);
        for (int c = 0; c < u.dim(); ++c) {
          double d = u(idx, c) - u(r, c);
          e += w * d * d;
        }
      }
      if (up) {
        std::size_t t = g.index(i, j + 1);
        for (int c = 0; c < u.dim(); ++c) {
          double d = u(idx, c) - u(t, c);
          e += d * d;
        }
      }
    }
  }
  return e;
}

void trace_flux(const MapField& u, std::size_t flat_idx, std::span<double> out) {
  const Grid& g = u.grid();
  int i, j;
  g.node_ij(flat_idx, i, j);
  for (int c = 0; c < u.dim(); ++c) {
    double acc = 0.0;
    if (g.in_domain(i, j + 1)) acc += u(flat_idx, c) - u(g.index(i, j + 1), c);
    if (g.in_domain(i - 1, j)) acc += 0.5 * (u(flat_idx, c) - u(g.index(i - 1, j), c));
    if (g.in_domain(i + 1, j)) acc += 0.5 * (u(flat_idx, c) - u(g.index(i + 1, j), c));
    out[c] = acc / g.h();
  }
}

namespace {

// Solve with given trace; returns field and fills the tangential flux at
// every flat node (projection onto T_u S^n) plus its L2(I) norm.
struct TraceEval {
  MapField field;
  std::vector<double> tan_flux;  // per flat node * dim
  double residual;
  double energy;
};

TraceEval eval_trace(const LaplaceSolver& solver, const MapField& arc_bdata,
                     std::span<const double> trace, int dim) {
  const Grid& g = solver.grid();
  const auto& flat = g.flat_boundary();
  MapField bdata = arc_bdata;
  for (std::size_t k = 0; k < flat.size(); ++k)
    for (int c = 0; c < dim; ++c) bdata(flat[k], c) = trace[k * dim + c];

  TraceEval ev{solver.solve_laplace(bdata), {}, 0.0, 0.0};
  ev.tan_flux.assign(flat.size() * dim, 0.0);
  std::vector<double> flux(dim);
  double res2 = 0.0;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    trace_flux(ev.field, flat[k], flux);
    const double* uval = &trace[k * dim];
    double dot = 0.0;
    for (int c = 0; c < dim; ++c) dot += flux[c] * uval[c];
    double t2 = 0.0;
    for (int c = 0; c < dim; ++c) {
      double t = flux[c] - dot * uval[c];
      ev.tan_flux[k * dim + c] = t;
      t2 += t * t;
    }
    res2 += g.h() * t2;
  }
  ev.residual = std::sqrt(res2);
  ev.energy = discrete_energy(ev.field);
  return ev;
}

MapField arc_boundary_field(const LaplaceSolver& solver, const ArcData& arc, int dim) {
  const Grid& g = solver.grid();
  MapField bdata(g, dim, true);
  for (std::size_t idx : g.arc_boundary()) {
    double x, y;
    g.node_coords(idx, x, y);
    arc(x, y, bdata.at(idx));
  }
  return bdata;
}

void project_step(std::span<const double> trace, std::span<const double> dir, double step,
                  int dim, std::vector<double>& out) {
  const std::size_t n = trace.size() / dim;
  out.resize(trace.size());
  for (std::size_t k = 0; k < n; ++k) {
    double nrm2 = 0.0;
    for (int c = 0; c < dim; ++c) {
      double v = trace[k * dim + c] - step * dir[k * dim + c];
      out[k * dim + c] = v;
      nrm2 += v * v;
    }
    double nrm = std::sqrt(nrm2);
    if (nrm < 1e-8)
      throw std::runtime_error("descent step would project a near-zero vector (step too large)");
    for (int c = 0; c < dim; ++c) out[k * dim + c] /= nrm;
  }
}

void check_unit_trace(std::span<const double> trace, int dim) {
  for (std::size_t k = 0; k < trace.size() / dim; ++k) {
    double n2 = 0.0;
    for (int c = 0; c < dim; ++c) n2 += trace[k * dim + c] * trace[k * dim + c];
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-8)
      throw std::invalid_argument("trace must be unit modulus on I");
  }
}

}  // namespace

SolveResult solve_free_boundary(const LaplaceSolver& solver, const ArcData& arc_data,
                                std::vector<double> trace, int dim, const SolverConfig& cfg) {
  cfg.validate();
  const Grid& g = solver.grid();
  if (!g.spec().is_half())
    throw std::invalid_argument("solve_free_boundary: needs a half domain");
  check_unit_trace(trace, dim);

  MapField arc_bdata = arc_boundary_field(solver, arc_data, dim);
  if (arc_bdata.max_ball_violation() > 1e-9)
    throw std::invalid_argument("solve_free_boundary: arc data leaves the closed unit ball");

  TraceEval cur = eval_trace(solver, arc_bdata, trace, dim);
  SolveReport rep;
  rep.energy_history.push_back(cur.energy);

  std::vector<double> prev_trace, prev_flux, cand;
  double step = cfg.step;
  const double armijo_c = 1e-4;

  int it = 0;
  for (; it < cfg.max_iters && cur.residual > cfg.tol_tangent; ++it) {
    // Barzilai-Borwein trial step from the last accepted move
    if (!prev_trace.empty()) {
      double sy = 0.0, ss = 0.0;
      for (std::size_t q = 0; q < trace.size(); ++q) {
        double s = trace[q] - prev_trace[q];
        double y = cur.tan_flux[q] - prev_flux[q];
        ss += s * s;
        sy += s * y;
      }
      if (sy > 1e-300) step = std::min(ss / sy, cfg.step_cap);
      else step = cfg.step;
    }

    double g2 = 0.0;
    for (double v : cur.tan_flux) g2 += v * v;
    if (g2 == 0.0) break;

    bool accepted = false;
    double s = step;
    for (int bt = 0; bt < 40; ++bt) {
      project_step(trace, cur.tan_flux, s, dim, cand);
      TraceEval trial = eval_trace(solver, arc_bdata, cand, dim);
      if (trial.energy <= cur.energy - armijo_c * s * g2) {
        prev_trace = trace;
        prev_flux = cur.tan_flux;
        trace = cand;
        cur = std::move(trial);
        rep.energy_history.push_back(cur.energy);
        accepted = true;
        break;
      }
      s *= cfg.armijo;
    }
    if (!accepted) break;  // line search exhausted: report as-is
  }

  rep.iterations = it;
  rep.tangential_residual = cur.residual;
  rep.converged = cur.residual <= cfg.tol_tangent;
  rep.energy = dirichlet_energy(cur.field);
  cur.field.set_ball_valued(true);
  return {std::move(cur.field), std::move(rep)};
}

std::vector<double> descent_step(const LaplaceSolver& solver, const ArcData& arc_data,
                                 std::span<const double> trace, int dim, double step) {
  check_unit_trace(trace, dim);
  MapField arc_bdata = arc_boundary_field(solver, arc_data, dim);
  TraceEval cur = eval_trace(solver, arc_bdata, trace, dim);
  std::vector<double> out;
  project_step(trace, cur.tan_flux, step, dim, out);
  return out;
}

}  // namespace fbh

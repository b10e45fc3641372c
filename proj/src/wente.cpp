#include "fbh/wente.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fbh/bubble.hpp"

namespace fbh {

namespace {

ScalarField gradient_modulus(const MapField& f) {
  const Grid& g = f.grid();
  Gradient gr = gradient(f);
  ScalarField out(g, 1);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx)
    if (g.node_class(idx) != NodeClass::outside)
      out(idx, 0) = std::sqrt(gr.sq_norm_at(idx));
  return out;
}

}  // namespace

ScalarField jacobian_rhs(const ScalarField& a, const ScalarField& b) {
  if (a.dim() != 1 || b.dim() != 1)
    throw std::invalid_argument("jacobian_rhs: scalar inputs required");
  if (&a.grid() != &b.grid())
    throw std::invalid_argument("jacobian_rhs: a and b must share a grid");
  const Grid& g = a.grid();
  Gradient ga = gradient(a), gb = gradient(b);
  ScalarField rhs(g, 1);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    rhs(idx, 0) = ga.gx(idx, 0) * gb.gy(idx, 0) - ga.gy(idx, 0) * gb.gx(idx, 0);
  }
  return rhs;
}

WenteSolution wente_solve(const WenteProblem& p, const LaplaceSolver& solver) {
  if (&solver.grid() != &p.a.grid())
    throw std::invalid_argument("wente_solve: solver grid mismatch");
  const Grid& g = p.a.grid();
  ScalarField rhs = jacobian_rhs(p.a, p.b);
  ScalarField zero(g, 1);
  WenteSolution sol{solver.solve_poisson(rhs, zero), 0.0, 0.0, 0.0};
  sol.grad_l2 = std::sqrt(dirichlet_energy(sol.phi));
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx)
    if (g.node_class(idx) != NodeClass::outside)
      sol.sup_abs = std::max(sol.sup_abs, std::abs(sol.phi(idx, 0)));
  sol.grad_l21 = lorentz_norm(gradient_modulus(sol.phi), LorentzKind::L2_1);
  return sol;
}

WenteSolution wente_solve(const WenteProblem& p) {
  LaplaceSolver solver(p.a.grid());
  return wente_solve(p, solver);
}

std::vector<WenteRatioSample> wente_ratio_probe(const std::vector<WenteProblem>& samples,
                                                const LaplaceSolver& solver) {
  std::vector<WenteRatioSample> out;
  out.reserve(samples.size());
  for (const WenteProblem& p : samples) {
    double denom = std::sqrt(dirichlet_energy(p.a)) * std::sqrt(dirichlet_energy(p.b));
    if (denom < 1e-30)
      throw std::invalid_argument("wente_ratio_probe: degenerate sample (constant a or b)");
    WenteSolution sol = wente_solve(p, solver);
    out.push_back({sol.grad_l2 / denom, sol.sup_abs / denom, sol.grad_l21 / denom});
  }
  return out;
}

std::vector<WenteProblem> random_trig_bank(const Grid& g, int count, unsigned seed) {
  if (count < 1) throw std::invalid_argument("random_trig_bank: count must be >= 1");
  std::mt19937 gen(seed);
  // continuous wavenumbers so the bank reaches down to near-linear fields
  // (the high-ratio regime); pure integer modes systematically under-probe
  std::uniform_real_distribution<double> mode(-3.0, 3.0);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  const double scale = M_PI / g.spec().outer;

  std::uniform_real_distribution<double> logfreq(std::log(0.1), std::log(1.0));

  auto make_field = [&]() {
    struct Mode { double kx, ky, a, p; };
    std::vector<Mode> modes;
    // per-field frequency scale, log-uniform: low-frequency (near-linear)
    // fields carry the high Wente ratios and must appear in the bank
    double fs = std::exp(logfreq(gen));
    for (int m = 0; m < 3; ++m) {
      double kx = fs * mode(gen), ky = fs * mode(gen);
      if (std::hypot(kx, ky) < 0.01) kx += 0.05;
      modes.push_back({kx * scale, ky * scale, amp(gen), phase(gen)});
    }
    ScalarField f(g, 1);
    for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
      double x, y;
      g.node_coords(idx, x, y);
      double v = 0.0;
      for (const Mode& m : modes) v += m.a * std::sin(m.kx * x + m.ky * y + m.p);
      f(idx, 0) = v;
    }
    return f;
  };

  std::vector<WenteProblem> bank;
  bank.reserve(count);
  for (int k = 0; k < count; ++k) {
    ScalarField a = make_field();
    ScalarField b = make_field();
    bank.push_back({std::move(a), std::move(b)});
  }
  return bank;
}

namespace {

void fnv_mix(std::uint64_t& h, const std::vector<double>& data) {
  const unsigned char* p = reinterpret_cast<const unsigned char*>(data.data());
  for (std::size_t k = 0; k < data.size() * sizeof(double); ++k) {
    h ^= p[k];
    h *= 1099511628211ull;
  }
}

}  // namespace

WenteConstants measure_constants(int nodes_per_diameter, int bank_size, unsigned seed) {
  WenteConstants c;
  c.grid = nodes_per_diameter;
  std::uint64_t hash = 1469598103934665603ull;

  {
    DomainSpec ds{DomainKind::full_disc, 0.0, 1.0, nodes_per_diameter};
    Grid g(ds);
    LaplaceSolver solver(g);
    auto bank = random_trig_bank(g, bank_size, seed);
    for (const auto& p : bank) { fnv_mix(hash, p.a.raw()); fnv_mix(hash, p.b.raw()); }
    for (const auto& r : wente_ratio_probe(bank, solver)) {
      c.K0 = std::max(c.K0, r.ratio_grad);
      c.Kinf = std::max(c.Kinf, r.ratio_sup);
    }
  }
  {
    DomainSpec ds{DomainKind::annulus, 0.25, 1.0, nodes_per_diameter};
    Grid g(ds);
    LaplaceSolver solver(g);
    auto bank = random_trig_bank(g, bank_size, seed + 1);
    for (const auto& p : bank) { fnv_mix(hash, p.a.raw()); fnv_mix(hash, p.b.raw()); }
    for (const auto& r : wente_ratio_probe(bank, solver))
      c.K1 = std::max(c.K1, r.ratio_l21);
  }
  {
    // angular constant, measured on a symmetrized bubble neck
    DomainSpec ds{DomainKind::half_annulus, 0.125, 1.0, nodes_per_diameter};
    Grid g(ds);
    const double lam_b = 0.02;  // bubble scale well inside the hole: |u| >= 1/2 holds
    HalfPlaneBubble b(AnalyticBubble::canonical(1));
    MapField u(g, b.ambient_dim() + 1, true);
    for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
      double x, y;
      g.node_coords(idx, x, y);
      b.eval(Complex(x, y) / lam_b, u.at(idx));
    }
    SymmetrizedSystem s = symmetrize(u);
    c.K2 = angular_estimate_probe(s, 0.125).measured_K2;
  }

  std::ostringstream hs;
  hs << std::hex << hash;
  c.bank_hash = hs.str();
  EpsilonConstants e = epsilon_constants(c.K0);
  c.eps2 = e.eps2;
  c.eps1 = e.eps1;
  return c;
}

void write_constants_json(std::ostream& os, const WenteConstants& c) {
  nlohmann::json j{{"K0", c.K0},       {"K1", c.K1},   {"K2", c.K2},
                   {"Kinf", c.Kinf},   {"grid", c.grid}, {"bank_hash", c.bank_hash},
                   {"eps2", c.eps2},   {"eps1", c.eps1}};
  os << j.dump(2) << "\n";
}

WenteConstants read_constants_json(std::istream& is) {
  nlohmann::json j;
  is >> j;
  WenteConstants c;
  c.K0 = j.at("K0").get<double>();
  c.K1 = j.at("K1").get<double>();
  c.K2 = j.at("K2").get<double>();
  c.Kinf = j.value("Kinf", 0.0);
  c.grid = j.at("grid").get<int>();
  c.bank_hash = j.at("bank_hash").get<std::string>();
  c.eps2 = j.at("eps2").get<double>();
  c.eps1 = j.at("eps1").get<double>();
  return c;
}

HodgeDecomposition hodge_split(const MapField& D, const LaplaceSolver& solver) {
  if (&solver.grid() != &D.grid())
    throw std::invalid_argument("hodge_split: solver grid mismatch");
  const Grid& g = D.grid();
  const double h2 = g.h() * g.h();
  MapField rhs(g, D.dim());
  // the solver's own five-point Laplacian of D, so the split is exact at
  // the discrete level
  for (std::size_t idx : g.interior()) {
    int i, j;
    g.node_ij(idx, i, j);
    for (int c = 0; c < D.dim(); ++c) {
      double acc = -4.0 * D(idx, c);
      acc += D(g.index(i + 1, j), c) + D(g.index(i - 1, j), c);
      acc += D(g.index(i, j + 1), c) + D(g.index(i, j - 1), c);
      rhs(idx, c) = acc / h2;
    }
  }
  MapField zero(g, D.dim());
  HodgeDecomposition out{D, MapField(g, D.dim()), solver.solve_poisson(rhs, zero)};
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    for (int c = 0; c < D.dim(); ++c)
      out.harmonic_part(idx, c) = D(idx, c) - out.potential_part(idx, c);
  }
  return out;
}

HodgeDecomposition hodge_split(const MapField& D) {
  LaplaceSolver solver(D.grid());
  return hodge_split(D, solver);
}

DecayCheck harmonic_decay_check(const MapField& v, double r) {
  const Grid& g = v.grid();
  if (r > g.spec().outer)
    throw std::invalid_argument("harmonic_decay_check: disc leaves the domain");
  if (r / 16.0 < 4.0 * g.h())
    throw std::invalid_argument("harmonic_decay_check: inner disc underresolved");
  auto disc = [](double rad) {
    return [rad](double x, double y) { return x * x + y * y <= rad * rad; };
  };
  double outer = dirichlet_energy_fractional(v, disc(r));
  double inner = dirichlet_energy_fractional(v, disc(r / 16.0));
  DecayCheck out{0.0, false};
  if (outer < 1e-28) {
    out.degenerate = true;
    return out;
  }
  out.ratio = std::sqrt(inner / outer);
  return out;
}

AngularEstimate angular_estimate_probe(const SymmetrizedSystem& s, double lambda) {
  const Grid& g = *s.grid;
  if (g.spec().kind != DomainKind::annulus)
    throw std::invalid_argument("angular_estimate_probe: needs a symmetrized annulus");
  const double rin = g.spec().inner;
  if (lambda < rin || 2.0 * lambda >= 0.5 * g.spec().outer)
    throw std::invalid_argument("angular_estimate_probe: lambda out of range");
  const int dim = s.dim();

  // extend u~ and A across the hole, assemble D on the full disc
  KelvinExtension ue = kelvin_extend_inward(s.u_tilde, lambda);
  KelvinExtension Ae = kelvin_extend_inward(s.A, lambda);
  const Grid& gd = ue.extended.grid();
  Gradient gA = gradient(Ae.extended);
  Gradient gU = gradient(ue.extended);
  MapField rhsD(gd, dim);
  for (std::size_t idx = 0; idx < gd.num_nodes(); ++idx) {
    if (gd.node_class(idx) == NodeClass::outside) continue;
    for (int c = 0; c < dim; ++c)
      rhsD(idx, c) = gA.gx(idx, 0) * gU.gy(idx, c) - gA.gy(idx, 0) * gU.gx(idx, c);
  }
  LaplaceSolver disc_solver(gd);
  MapField zero_d(gd, dim);
  MapField D = disc_solver.solve_poisson(rhsD, zero_d);
  Gradient gD = gradient(D);

  // psi on the annulus: Delta psi_j = sum_i <X_{i,j}, grad u~_i>
  Gradient gu = gradient(s.u_tilde);
  MapField rhsP(g, dim);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    for (int j = 0; j < dim; ++j) {
      double acc = 0.0;
      for (int i = 0; i < dim; ++i) {
        const MapField& X = s.Xij(i, j);
        acc += X(idx, 0) * gu.gx(idx, i) + X(idx, 1) * gu.gy(idx, i);
      }
      rhsP(idx, j) = acc;
    }
  }
  LaplaceSolver ann_solver(g);
  MapField zero_a(g, dim);
  MapField psi = ann_solver.solve_poisson(rhsP, zero_a);
  Gradient gP = gradient(psi);

  // grad v = A grad u~ - grad_perp D - grad psi on the annulus
  MapField vgx(g, dim), vgy(g, dim);
  std::vector<double> bx(dim), by(dim);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    double x, y;
    g.node_coords(idx, x, y);
    gD.gx.interpolate(x, y, bx);
    gD.gy.interpolate(x, y, by);
    double A = s.A(idx, 0);
    for (int c = 0; c < dim; ++c) {
      vgx(idx, c) = A * gu.gx(idx, c) + by[c] - gP.gx(idx, c);
      vgy(idx, c) = A * gu.gy(idx, c) - bx[c] - gP.gy(idx, c);
    }
  }

  AngularEstimate out{};
  std::vector<WeightedSample> ang;
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    double x, y;
    g.node_coords(idx, x, y);
    double r = std::hypot(x, y);
    if (r < 2.0 * lambda || r > 0.5 * g.spec().outer || r < 1e-14) continue;
    double ct = x / r, st = y / r;
    double m2 = 0.0;
    for (int c = 0; c < dim; ++c) {
      double gt = -st * vgx(idx, c) + ct * vgy(idx, c);
      m2 += gt * gt;
    }
    ang.push_back({std::sqrt(m2), g.cell_area(idx)});
  }
  out.lhs_l21 = lorentz_norm(std::move(ang), LorentzKind::L2_1);
  auto beyond = [lambda](double x, double y) { return x * x + y * y >= lambda * lambda; };
  out.grad_D_sq = dirichlet_energy_fractional(D, beyond);
  out.grad_u_sq = dirichlet_energy_fractional(s.u_tilde, beyond);
  double denom = std::sqrt(2.0 * (out.grad_D_sq + out.grad_u_sq));
  out.measured_K2 = denom > 1e-30 ? out.lhs_l21 / denom : 0.0;

  // log coefficient of the harmonic part from the radial flux on a mid circle
  const double rc = std::sqrt(2.0 * lambda * 0.5 * g.spec().outer);
  const int nth = 360;
  std::vector<double> cx(dim), cy(dim), d0(dim, 0.0);
  for (int k = 0; k < nth; ++k) {
    double th = 2.0 * M_PI * k / nth;
    double px = rc * std::cos(th), py = rc * std::sin(th);
    vgx.interpolate(px, py, cx);
    vgy.interpolate(px, py, cy);
    for (int c = 0; c < dim; ++c)
      d0[c] += (std::cos(th) * cx[c] + std::sin(th) * cy[c]) * rc * (2.0 * M_PI / nth);
  }
  double m = 0.0;
  for (int c = 0; c < dim; ++c) m += d0[c] * d0[c];
  out.d0_log_coeff = std::sqrt(m) / (2.0 * M_PI);
  return out;
}

}  // namespace fbh

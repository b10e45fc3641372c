#include "fbh/bubbletree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace fbh {

namespace {

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

int odd_at_least(int n, int lo) {
  n = std::max(n, lo);
  return n | 1;
}

}  // namespace

double BubbleSpec::scale(int m) const { return lambda0 * std::pow(4.0, -m); }

void GluingFamily::base_value(double x, double y, std::span<double> out) const {
  if (base_profile) {
    base_profile->eval(Complex(x, y), out);
    return;
  }
  if ((int)base_constant.size() != dim)
    throw std::invalid_argument("GluingFamily: base_constant size != dim");
  for (int c = 0; c < dim; ++c) out[c] = base_constant[c];
}

void GluingFamily::validate(int m, double outer) const {
  if (m < 0) throw std::invalid_argument("GluingFamily: index m must be >= 0");
  if (cutoff_c <= 1.0) throw std::invalid_argument("GluingFamily: cutoff_c must exceed 1");
  for (std::size_t i = 0; i < bubbles.size(); ++i) {
    double sl = std::sqrt(bubbles[i].scale(m));
    if (bubbles[i].lambda0 <= 0.0)
      throw std::invalid_argument("GluingFamily: lambda0 must be positive");
    if (std::abs(bubbles[i].center) + cutoff_c * sl >= outer) {
      std::ostringstream os;
      os << "GluingFamily: bubble " << i << " support leaves the half disc at m = " << m;
      throw std::invalid_argument(os.str());
    }
    for (std::size_t j = i + 1; j < bubbles.size(); ++j) {
      double slj = std::sqrt(bubbles[j].scale(m));
      if (std::abs(bubbles[i].center - bubbles[j].center) <= cutoff_c * (sl + slj)) {
        std::ostringstream os;
        os << "GluingFamily: bubbles " << i << " and " << j << " have overlapping supports at m = "
           << m;
        throw std::invalid_argument(os.str());
      }
    }
  }
}

void family_value(const GluingFamily& f, int m, double x, double y, std::span<double> out) {
  f.base_value(x, y, out);
  std::vector<double> w(f.dim);
  for (const BubbleSpec& b : f.bubbles) {
    double lam = b.scale(m);
    double sl = std::sqrt(lam);
    double r = std::hypot(x - b.center, y);
    if (r >= f.cutoff_c * sl) continue;
    double chi = 1.0;
    if (r > sl / f.cutoff_c) {
      double t = std::log(r / (sl / f.cutoff_c)) / (2.0 * std::log(f.cutoff_c));
      chi = 1.0 - smoothstep(t);
    }
    b.profile.eval(Complex((x - b.center) / lam, y / lam), w);
    for (int c = 0; c < f.dim; ++c) out[c] = chi * w[c] + (1.0 - chi) * out[c];
  }
  double n2 = 0.0;
  for (int c = 0; c < f.dim; ++c) n2 += out[c] * out[c];
  if (n2 > 1.0) {
    double n = std::sqrt(n2);
    for (int c = 0; c < f.dim; ++c) out[c] /= n;
  }
}

MapField glue_family(const GluingFamily& f, int m, const Grid& g) {
  if (!g.spec().is_half())
    throw std::invalid_argument("glue_family: needs a half domain");
  f.validate(m, g.spec().outer);
  MapField u(g, f.dim, true);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    double x, y;
    g.node_coords(idx, x, y);
    family_value(f, m, x, y, u.at(idx));
  }
  for (std::size_t idx : g.flat_boundary()) {
    double n = u.norm_at(idx);
    auto v = u.at(idx);
    if (n < 1e-12) {
      // blend cancellation: fall back to the base direction
      double x, y;
      g.node_coords(idx, x, y);
      f.base_value(x, y, v);
      n = u.norm_at(idx);
    }
    for (int c = 0; c < f.dim; ++c) v[c] /= n;
  }
  return u;
}

SolveResult harmonize_family(const GluingFamily& f, int m, const LaplaceSolver& solver,
                             const SolverConfig& cfg) {
  const Grid& g = solver.grid();
  f.validate(m, g.spec().outer);
  ArcData arc = [&f, m](double x, double y, std::span<double> out) {
    family_value(f, m, x, y, out);
  };
  const auto& flat = g.flat_boundary();
  std::vector<double> trace(flat.size() * f.dim);
  std::vector<double> buf(f.dim);
  for (std::size_t k = 0; k < flat.size(); ++k) {
    double x, y;
    g.node_coords(flat[k], x, y);
    family_value(f, m, x, y, buf);
    double n = 0.0;
    for (double v : buf) n += v * v;
    n = std::sqrt(n);
    if (n < 1e-12) {
      f.base_value(x, y, buf);
      n = 1.0;
    }
    for (int c = 0; c < f.dim; ++c) trace[k * f.dim + c] = buf[c] / n;
  }
  return solve_free_boundary(solver, arc, std::move(trace), f.dim, cfg);
}

namespace {

// per-node energy contribution cell_area * |grad u|^2
std::vector<double> energy_density(const MapField& u) {
  const Grid& g = u.grid();
  Gradient gr = gradient(u);
  std::vector<double> e(g.num_nodes(), 0.0);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx)
    if (g.node_class(idx) != NodeClass::outside)
      e[idx] = g.cell_area(idx) * gr.sq_norm_at(idx);
  return e;
}

double ball_energy(const Grid& g, const std::vector<double>& dens, double ax, double ay,
                   double r) {
  int ic = (int)std::lround(ax / g.h());
  int jc = (int)std::lround(ay / g.h());
  int w = (int)std::ceil(r / g.h()) + 1;
  double acc = 0.0;
  for (int j = jc - w; j <= jc + w; ++j) {
    for (int i = ic - w; i <= ic + w; ++i) {
      if (!g.in_lattice(i, j)) continue;
      double dx = g.x(i) - ax, dy = g.y(j) - ay;
      if (dx * dx + dy * dy > r * r) continue;
      acc += dens[g.index(i, j)];
    }
  }
  return acc;
}

}  // namespace

ConcentrationReport detect_concentration(const std::vector<const MapField*>& u_ms,
                                         double eps, const std::vector<double>& radii) {
  if (u_ms.size() < 2)
    throw std::invalid_argument("detect_concentration: need at least two family indices");
  if (eps <= 0.0 || radii.empty())
    throw std::invalid_argument("detect_concentration: need eps > 0 and a radius scan");
  const MapField& last = *u_ms.back();
  const MapField& prev = *u_ms[u_ms.size() - 2];
  const Grid& g = last.grid();
  double rmin = *std::min_element(radii.begin(), radii.end());

  std::vector<double> d_last = energy_density(last);
  std::vector<double> d_prev = energy_density(prev);

  ConcentrationReport rep;
  std::vector<std::pair<double, double>> marked;  // (x, energy at last index)
  for (std::size_t idx : g.flat_boundary()) {
    double x, y;
    g.node_coords(idx, x, y);
    double el = ball_energy(g, d_last, x, 0.0, rmin);
    double ep = ball_energy(prev.grid(), d_prev, x, 0.0, rmin);
    if (el > eps && ep > eps) marked.emplace_back(x, el);
  }
  std::sort(marked.begin(), marked.end());
  std::size_t k = 0;
  while (k < marked.size()) {
    std::size_t j = k;
    double bx = marked[k].first, be = marked[k].second;
    while (j + 1 < marked.size() && marked[j + 1].first - marked[j].first <= rmin) {
      ++j;
      if (marked[j].second > be) { be = marked[j].second; bx = marked[j].first; }
    }
    rep.points.push_back(bx);
    rep.ball_energies.push_back(be);
    k = j + 1;
  }

  // interior diagnostic: balls kept clear of the boundary zone
  int stride = std::max(1, (int)(rmin / g.h()));
  for (std::size_t idx : g.interior()) {
    double x, y;
    g.node_coords(idx, x, y);
    int i, j;
    g.node_ij(idx, i, j);
    if (i % stride || j % stride) continue;
    if (y < 2.0 * rmin) continue;
    double e_full = ball_energy(g, d_last, x, y, rmin);
    if (e_full <= eps) continue;
    // concentration persists under shrinking balls; a diffuse tail keeps
    // only ~(1/2)^2 of its energy in the half-radius ball
    if (ball_energy(g, d_last, x, y, rmin / 2.0) < 0.5 * e_full) continue;
    bool dup = false;
    for (std::size_t q = 0; q < rep.interior_x.size(); ++q)
      if (std::hypot(rep.interior_x[q] - x, rep.interior_y[q] - y) < 2.0 * rmin) dup = true;
    if (!dup) {
      rep.interior_x.push_back(x);
      rep.interior_y.push_back(y);
    }
  }
  return rep;
}

namespace {

double annulus_energy(const MapField& u, double a, double lam, double r_i) {
  int nr = odd_at_least((int)(24.0 * std::log2(r_i / lam)), 17);
  LogPolarField lp(u, a, lam, r_i, nr, 129, u.grid().spec().is_half());
  return lp.energy();
}

}  // namespace

double select_scale(const MapField& u, double a, double r_i, double eps1) {
  const Grid& g = u.grid();
  if (r_i <= 4.0 * g.h())
    throw std::invalid_argument("select_scale: r_i underresolved");
  const double target = eps1 / 2.0;
  const double floor = g.h() / 4.0;

  // walk down from r_i to bracket the largest root of F(lambda) = target
  double hi = r_i, lo = r_i;
  double f_lo = 0.0;
  while (true) {
    lo = hi / 2.0;
    if (lo < floor) throw std::invalid_argument("select_scale: no concentration at a");
    f_lo = annulus_energy(u, a, lo, r_i);
    if (f_lo >= target) break;
    hi = lo;
  }
  if (f_lo == target) return lo;
  for (int it = 0; it < 60 && hi / lo > 1.0 + 1e-4; ++it) {
    double mid = std::sqrt(lo * hi);
    double f = annulus_energy(u, a, mid, r_i);
    if (f >= target) lo = mid; else hi = mid;
  }
  return std::sqrt(lo * hi);
}

ExtractedBubble rescale_extract(const MapField& u, double a, double lambda, double R,
                                int nodes_per_diameter) {
  const Grid& src = u.grid();
  if (std::abs(a) + lambda * R > src.spec().outer + 1e-12)
    throw std::invalid_argument("rescale_extract: window exceeds available data");
  DomainSpec ds{DomainKind::half_disc, 0.0, R, nodes_per_diameter};
  auto gptr = std::make_shared<Grid>(ds);
  const Grid& g = *gptr;
  ExtractedBubble out{gptr, MapField(g, u.dim(), u.ball_valued()), false, 0, {}, {}, 0.0, 0.0};
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    double x, y;
    g.node_coords(idx, x, y);
    u.interpolate(a + lambda * x, lambda * y, out.window.at(idx));
  }
  out.energy = dirichlet_energy(out.window);
  if (out.energy < 1e-8) return out;  // "no bubble"

  // plane: top-2 principal directions of the image cloud (disc through 0)
  const int d = u.dim();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    auto v = out.window.at(idx);
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q) C(p, q) += v[p] * v[q];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  out.plane_e1.resize(d);
  out.plane_e2.resize(d);
  for (int c = 0; c < d; ++c) {
    out.plane_e1[c] = es.eigenvectors()(c, d - 1);
    out.plane_e2[c] = es.eigenvectors()(c, d - 2);
  }
  double tr = es.eigenvalues().sum();
  out.plane_residual =
      tr > 0 ? (tr - es.eigenvalues()(d - 1) - es.eigenvalues()(d - 2)) / tr : 0.0;

  // degree: winding of the flat-boundary trace in the fitted plane
  double total = 0.0, prev = 0.0;
  bool have_prev = false;
  for (std::size_t idx : g.flat_boundary()) {
    auto v = out.window.at(idx);
    double p = 0.0, q = 0.0;
    for (int c = 0; c < d; ++c) { p += v[c] * out.plane_e1[c]; q += v[c] * out.plane_e2[c]; }
    if (std::hypot(p, q) < 0.2) { have_prev = false; continue; }
    double th = std::atan2(q, p);
    if (have_prev) {
      double dth = th - prev;
      while (dth > M_PI) dth -= 2.0 * M_PI;
      while (dth < -M_PI) dth += 2.0 * M_PI;
      total += dth;
    }
    prev = th;
    have_prev = true;
  }
  out.degree = (int)std::lround(std::abs(total) / (2.0 * M_PI));
  out.has_bubble = out.degree >= 1;
  return out;
}

std::vector<NeckRow> neck_scan(const MapField& u, double a, double lambda,
                               const std::vector<double>& Rs) {
  const Grid& g = u.grid();
  std::vector<NeckRow> rows;
  std::vector<double> nd(u.dim());
  for (double R : Rs) {
    double r0 = lambda * R, r1 = 1.0 / R;
    if (r0 >= r1) throw std::invalid_argument("neck_scan: annulus collapses (lambda R >= 1/R)");
    int nr = odd_at_least((int)(24.0 * std::log2(r1 / r0)), 17);
    LogPolarField lp(u, a, r0, r1, nr, 129, g.spec().is_half());
    NeckRow row{};
    row.R = R;
    row.delta = lp.scaled_sup_gradient();
    row.energy = lp.energy();
    row.l2weak = lorentz_norm(lp.gradient_samples(false), LorentzKind::L2_weak);
    row.l21theta = lorentz_norm(lp.gradient_samples(true), LorentzKind::L2_1);
    double ang = lp.angular_energy();
    row.pohozaev_ratio = ang > 1e-30 ? row.energy / (2.0 * ang) : 0.0;
    row.flux = 0.0;
    for (std::size_t idx : g.flat_boundary()) {
      double x, y;
      g.node_coords(idx, x, y);
      double s = std::abs(x - a);
      if (s < r0 || s > r1) continue;
      flat_normal_derivative(u, idx, nd);
      auto v = u.at(idx);
      double dot = 0.0;
      for (int c = 0; c < u.dim(); ++c) dot += v[c] * nd[c];
      row.flux += g.h() * dot;
    }
    rows.push_back(row);
  }
  return rows;
}

MeasureCheck residual_and_measure_check(
    const GluingFamily& f, const std::vector<int>& ms,
    const std::vector<const MapField*>& u_ms, const MapField& u_base,
    const std::vector<double>& bubble_energies, const std::vector<double>& bubble_centers,
    const std::vector<std::function<double(double)>>& psis) {
  if (ms.size() != u_ms.size())
    throw std::invalid_argument("residual_and_measure_check: schedule/field mismatch");
  if (bubble_energies.size() != bubble_centers.size())
    throw std::invalid_argument("residual_and_measure_check: extraction arrays mismatch");
  const Grid& g = u_base.grid();
  const int d = u_base.dim();

  // <mu, psi> = int_I psi u . d_nu u for a given field
  auto pairing = [&](const MapField& u, const std::function<double(double)>& psi) {
    std::vector<double> nd(d);
    double acc = 0.0;
    for (std::size_t idx : g.flat_boundary()) {
      double x, y;
      g.node_coords(idx, x, y);
      flat_normal_derivative(u, idx, nd);
      auto v = u.at(idx);
      double dot = 0.0;
      for (int c = 0; c < d; ++c) dot += v[c] * nd[c];
      acc += g.h() * psi(x) * dot;
    }
    return acc;
  };

  MeasureCheck out;
  out.psi_defects.assign(psis.size(), {});
  std::vector<double> w(d), winf(d);
  for (std::size_t k = 0; k < ms.size(); ++k) {
    const MapField& um = *u_ms[k];
    MapField Rm(g, d);
    for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
      if (g.node_class(idx) == NodeClass::outside) continue;
      double x, y;
      g.node_coords(idx, x, y);
      for (int c = 0; c < d; ++c) Rm(idx, c) = um(idx, c) - u_base(idx, c);
      for (const BubbleSpec& b : f.bubbles) {
        double lam = b.scale(ms[k]);
        b.profile.eval(Complex((x - b.center) / lam, y / lam), w);
        std::vector<double> vinf = b.profile.value_at_infinity();
        for (int c = 0; c < d; ++c) Rm(idx, c) -= w[c] - vinf[c];
      }
    }
    std::vector<double> nd(d);
    double acc = 0.0;
    for (std::size_t idx : g.flat_boundary()) {
      flat_normal_derivative(Rm, idx, nd);
      auto v = Rm.at(idx);
      double dot = 0.0;
      for (int c = 0; c < d; ++c) dot += v[c] * nd[c];
      acc += g.h() * dot;
    }
    out.residual_flux.push_back(acc);

    for (std::size_t p = 0; p < psis.size(); ++p) {
      double atoms = 0.0;
      for (std::size_t i = 0; i < bubble_energies.size(); ++i)
        atoms += bubble_energies[i] * psis[p](bubble_centers[i]);
      double defect = pairing(um, psis[p]) - pairing(u_base, psis[p]) - atoms;
      out.psi_defects[p].push_back(std::abs(defect));
    }
  }
  return out;
}

std::vector<QuantizationRow> quantization_report(const std::vector<double>& energies) {
  std::vector<QuantizationRow> out;
  for (double e : energies) {
    QuantizationRow row{e, (int)std::lround(e / (2.0 * M_PI)), 0.0};
    if (row.k < 1 && e > M_PI) row.k = 1;
    row.gap = std::abs(e - 2.0 * M_PI * row.k) / (2.0 * M_PI);
    out.push_back(row);
  }
  return out;
}

}  // namespace fbh

#include "fbh/reflection.hpp"

#include <cmath>
#include <sstream>

#include "fbh/logpolar.hpp"

namespace fbh {

double BumpFunction::value(double x, double y) const {
  double tx = (x - cx) / scale, ty = (y - cy) / scale;
  if (std::abs(tx) >= 1.0 || std::abs(ty) >= 1.0) return 0.0;
  double qx = (1 - tx * tx), qy = (1 - ty * ty);
  return qx * qx * qx * qx * qy * qy * qy * qy;
}

void BumpFunction::grad(double x, double y, double& gx, double& gy) const {
  double tx = (x - cx) / scale, ty = (y - cy) / scale;
  gx = gy = 0.0;
  if (std::abs(tx) >= 1.0 || std::abs(ty) >= 1.0) return;
  double qx = (1 - tx * tx), qy = (1 - ty * ty);
  gx = -8.0 * tx * qx * qx * qx * qy * qy * qy * qy / scale;
  gy = -8.0 * ty * qy * qy * qy * qx * qx * qx * qx / scale;
}

TestFunctionBank TestFunctionBank::cover_disc(double radius, int centers_per_axis,
                                              std::initializer_list<double> scales) {
  TestFunctionBank bank;
  for (double srel : scales) {
    double s = srel * radius;
    for (int a = 0; a < centers_per_axis; ++a) {
      for (int b = 0; b < centers_per_axis; ++b) {
        double cx = -radius + 2.0 * radius * (a + 0.5) / centers_per_axis;
        double cy = -radius + 2.0 * radius * (b + 0.5) / centers_per_axis;
        // support [c - s, c + s]^2 strictly inside the disc
        double corner = std::hypot(std::abs(cx) + s, std::abs(cy) + s);
        if (corner < radius * 0.999) bank.bumps.push_back({cx, cy, s});
      }
    }
  }
  return bank;
}

namespace {

// Test functions must be compactly supported inside the open domain: a bump
// whose support crosses the inner hole (or the outer circle) would pick up
// uncontrolled boundary terms in the integration by parts.
bool support_inside(const Grid& g, const BumpFunction& b) {
  const DomainSpec& sp = g.spec();
  double s = b.scale;
  double nx = std::max(0.0, std::abs(b.cx) - s);
  double ny = std::max(0.0, std::abs(b.cy) - s);
  double dnear = std::hypot(nx, ny);
  double dfar = std::hypot(std::abs(b.cx) + s, std::abs(b.cy) + s);
  if (dfar >= sp.outer) return false;
  if (sp.inner > 0.0 && dnear <= sp.inner) return false;
  return true;
}

}  // namespace

void ResidualStats::add(double v) {
  v = std::abs(v);
  max_abs = std::max(max_abs, v);
  rms = std::sqrt((rms * rms * count + v * v) / (count + 1));
  ++count;
}

SymmetrizedSystem symmetrize(const MapField& u) {
  const Grid& gh = u.grid();
  const DomainSpec& hs = gh.spec();
  if (!hs.is_half() || hs.kind == DomainKind::rectangle_halfplane_window)
    throw std::invalid_argument("symmetrize: needs a half disc or half annulus");

  // hypothesis (small-energy dilation): |u| >= 1/2 on the closed half domain
  for (std::size_t idx = 0; idx < gh.num_nodes(); ++idx) {
    if (gh.node_class(idx) == NodeClass::outside) continue;
    if (u.norm_at(idx) < 0.5) {
      double x, y;
      gh.node_coords(idx, x, y);
      std::ostringstream os;
      os << "symmetrize: |u| = " << u.norm_at(idx) << " < 1/2 at node (" << x << ", " << y
         << ") -- the reflection hypothesis fails";
      throw std::invalid_argument(os.str());
    }
  }

  DomainSpec fs = hs;
  fs.kind = hs.kind == DomainKind::half_disc ? DomainKind::full_disc : DomainKind::annulus;
  auto grid = std::make_shared<Grid>(fs);
  const Grid& gf = *grid;
  const int dim = u.dim();

  SymmetrizedSystem s{grid, MapField(gf, dim, true), ScalarField(gf, 1), {}, 1e300, 0, 1e300, 0};

  for (int j = gf.jmin(); j <= gf.half_extent(); ++j) {
    for (int i = -gf.half_extent(); i <= gf.half_extent(); ++i) {
      std::size_t idx = gf.index(i, j);
      int jsrc = j >= 0 ? j : -j;
      if (!gh.in_lattice(i, jsrc)) continue;
      std::size_t src = gh.index(i, jsrc);
      if (j >= 0) {
        for (int c = 0; c < dim; ++c) s.u_tilde(idx, c) = u(src, c);
        s.A(idx, 0) = 1.0;
      } else {
        // sigma(z) = z/|z|^2 composed with the reflection r
        double m2 = 0.0;
        for (int c = 0; c < dim; ++c) m2 += u(src, c) * u(src, c);
        if (m2 < 1e-30) m2 = 1.0;
        for (int c = 0; c < dim; ++c) s.u_tilde(idx, c) = u(src, c) / m2;
        double ut2 = 1.0 / m2;  // |u~|^2 = 1/|u|^2
        s.A(idx, 0) = 1.0 / ut2;
      }
      if (gf.node_class(idx) != NodeClass::outside) {
        double a = s.A(idx, 0);
        s.min_A = std::min(s.min_A, a);
        s.max_A = std::max(s.max_A, a);
        s.max_Ainv = std::max(s.max_Ainv, 1.0 / a);
      }
    }
  }
  for (std::size_t idx = 0; idx < gh.num_nodes(); ++idx)
    if (gh.node_class(idx) != NodeClass::outside)
      s.min_upper_modulus = std::min(s.min_upper_modulus, u.norm_at(idx));

  Gradient gu = gradient(s.u_tilde);
  s.X.reserve(dim * dim);
  for (int a = 0; a < dim * dim; ++a) s.X.emplace_back(gf, 2);
  const double h = gf.h();
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      MapField& Xij = s.X[i * dim + j];
      MapField& Xji = s.X[j * dim + i];
      for (int jj = gf.jmin(); jj <= 0; ++jj) {
        for (int ii = -gf.half_extent(); ii <= gf.half_extent(); ++ii) {
          std::size_t idx = gf.index(ii, jj);
          if (gf.node_class(idx) == NodeClass::outside) continue;
          double m2 = 0.0;
          for (int c = 0; c < dim; ++c) m2 += s.u_tilde(idx, c) * s.u_tilde(idx, c);
          double m4 = m2 * m2;
          double gxi = gu.gx(idx, i), gxj = gu.gx(idx, j);
          double gyi = gu.gy(idx, i), gyj = gu.gy(idx, j);
          // X jumps to zero across I; on the line row store half of the
          // one-sided from-below value (the distributional convention),
          // so circle and cell quadratures crossing I converge.
          double half = 1.0;
          if (jj == 0) {
            half = 0.5;
            if (gf.in_domain(ii, -1) && gf.in_domain(ii, -2)) {
              for (int c : {i, j}) {
                double f0 = s.u_tilde(idx, c);
                double f1 = s.u_tilde(gf.index(ii, -1), c);
                double f2 = s.u_tilde(gf.index(ii, -2), c);
                double d = (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h);
                if (c == i) gyi = d; else gyj = d;
              }
            } else {
              continue;  // no below-line data: leave the row at zero
            }
          }
          double xx = half * 2.0 * (s.u_tilde(idx, j) * gxi - s.u_tilde(idx, i) * gxj) / m4;
          double xy = half * 2.0 * (s.u_tilde(idx, j) * gyi - s.u_tilde(idx, i) * gyj) / m4;
          Xij(idx, 0) = xx;
          Xij(idx, 1) = xy;
          Xji(idx, 0) = -xx;
          Xji(idx, 1) = -xy;
        }
      }
    }
  }
  return s;
}

ResidualStats weak_residual_div_form(const SymmetrizedSystem& s, const TestFunctionBank& bank) {
  const Grid& g = *s.grid;
  const int dim = s.dim();
  Gradient gu = gradient(s.u_tilde);
  ResidualStats stats;
  for (const BumpFunction& b : bank.bumps) {
    if (!support_inside(g, b)) continue;
    std::vector<double> res(dim, 0.0);
    for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
      if (g.node_class(idx) == NodeClass::outside) continue;
      double x, y;
      g.node_coords(idx, x, y);
      double v = b.value(x, y);
      double gvx, gvy;
      b.grad(x, y, gvx, gvy);
      if (v == 0.0 && gvx == 0.0 && gvy == 0.0) continue;
      double w = g.cell_area(idx);
      double A = s.A(idx, 0);
      for (int j = 0; j < dim; ++j) {
        double t = A * (gu.gx(idx, j) * gvx + gu.gy(idx, j) * gvy);
        double rhs = 0.0;
        for (int i = 0; i < dim; ++i) {
          const MapField& X = s.Xij(i, j);
          rhs += X(idx, 0) * gu.gx(idx, i) + X(idx, 1) * gu.gy(idx, i);
        }
        res[j] += w * (t - rhs * v);
      }
    }
    for (int j = 0; j < dim; ++j) stats.add(res[j]);
  }
  return stats;
}

DivFreeStats divfree_check(const SymmetrizedSystem& s, const TestFunctionBank& bank,
                           const std::vector<double>& circle_radii) {
  const Grid& g = *s.grid;
  const int dim = s.dim();
  DivFreeStats out;
  for (const BumpFunction& b : bank.bumps) {
    if (!support_inside(g, b)) continue;
    for (int i = 0; i < dim; ++i) {
      for (int j = i + 1; j < dim; ++j) {
        const MapField& X = s.Xij(i, j);
        double acc = 0.0;
        for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
          if (g.node_class(idx) == NodeClass::outside) continue;
          double x, y;
          g.node_coords(idx, x, y);
          double gvx, gvy;
          b.grad(x, y, gvx, gvy);
          if (gvx == 0.0 && gvy == 0.0) continue;
          acc += g.cell_area(idx) * (gvx * X(idx, 0) + gvy * X(idx, 1));
        }
        out.weak_divergence.add(acc);
      }
    }
  }
  // On an annulus the circles enclose the inner hole, which may carry a
  // genuine nonzero charge; the div-free statement is that the flux is the
  // same through every homotopic circle. The statistic is therefore the
  // spread of the flux across the radii (per component pair).
  double rin = g.spec().inner, rout = g.spec().outer;
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      double fmin = 1e300, fmax = -1e300;
      for (double r : circle_radii) {
        if (r <= rin || r >= rout)
          throw std::invalid_argument("divfree_check: circle radius outside the domain");
        double band = std::exp(2.0 * g.h() / r);
        int ntheta = std::max(181, 8 * (static_cast<int>(std::round(2.0 / g.h())) / 2) + 1);
        LogPolarField lp(s.Xij(i, j), 0.0, r / band, r * band, 5, ntheta, false);
        double f = lp.radial_flux_row(2);
        fmin = std::min(fmin, f);
        fmax = std::max(fmax, f);
      }
      if (circle_radii.size() >= 2)
        out.circle_flux.add(fmax - fmin);
      else if (!circle_radii.empty())
        out.circle_flux.add(fmax);
    }
  }
  return out;
}

StreamFunctionResult stream_function(const MapField& X, double gauge_x, double gauge_y,
                                     double flux_threshold) {
  if (X.dim() != 2) throw std::invalid_argument("stream_function: X must have 2 components");
  const Grid& g = X.grid();
  if (g.spec().kind != DomainKind::full_disc)
    throw std::invalid_argument("stream_function: needs a full disc grid");
  const double R = g.spec().outer;

  // boundary circulation and tangential integral at radius R - 2h
  const int nth = 720;
  const double rc = R - 2 * g.h();
  std::vector<double> Bc(nth + 1, 0.0);
  std::vector<double> buf(2);
  double prev = 0.0;
  for (int k = 0; k <= nth; ++k) {
    double th = 2 * M_PI * k / nth;
    X.interpolate(rc * std::cos(th), rc * std::sin(th), buf);
    double xn = buf[0] * std::cos(th) + buf[1] * std::sin(th);
    if (k > 0) Bc[k] = Bc[k - 1] - 0.5 * (xn + prev) * rc * (2 * M_PI / nth);
    prev = xn;
  }
  double circulation = Bc[nth];
  if (std::abs(circulation) > flux_threshold)
    throw std::invalid_argument("stream_function: nonzero boundary circulation, no single-valued B");

  // remove the small closure defect linearly, then solve the gauged Poisson problem
  for (int k = 0; k <= nth; ++k) Bc[k] -= circulation * k / nth;

  Gradient gX = gradient(X);
  MapField rhs(g, 1), bdata(g, 1);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    rhs(idx, 0) = gX.gx(idx, 1) - gX.gy(idx, 0);  // rot X = Delta B
  }
  for (std::size_t idx : g.arc_boundary()) {
    double x, y;
    g.node_coords(idx, x, y);
    double th = std::atan2(y, x);
    if (th < 0) th += 2 * M_PI;
    double pos = th / (2 * M_PI) * nth;
    int k = std::min((int)pos, nth - 1);
    bdata(idx, 0) = Bc[k] + (pos - k) * (Bc[k + 1] - Bc[k]);
  }
  LaplaceSolver solver(g);
  StreamFunctionResult out{solver.solve_poisson(rhs, bdata), 0.0};

  std::vector<double> gp(1);
  out.B.interpolate(gauge_x, gauge_y, gp);
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) out.B(idx, 0) -= gp[0];

  Gradient gB = gradient(out.B);
  double acc = 0.0;
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    double ex = -gB.gy(idx, 0) - X(idx, 0);
    double ey = gB.gx(idx, 0) - X(idx, 1);
    acc += g.cell_area(idx) * (ex * ex + ey * ey);
  }
  out.defect_l2 = std::sqrt(acc);
  return out;
}

KelvinExtension kelvin_extend_inward(const MapField& f, double lambda) {
  const Grid& ga = f.grid();
  if (lambda >= 1.0 || lambda <= 0.0)
    throw std::invalid_argument("kelvin_extend_inward: need 0 < lambda < 1");
  if (ga.spec().kind != DomainKind::annulus)
    throw std::invalid_argument("kelvin_extend_inward: input must live on an annulus");

  DomainSpec ds = ga.spec();
  ds.kind = DomainKind::full_disc;
  ds.inner = 0.0;
  auto gptr = std::make_shared<Grid>(ds);
  const Grid& gd = *gptr;

  // radial cut-off: 1 up to sqrt(lambda), quintic smoothstep to 0 at r = 1
  // (in log r). The plateau covers the reflected image of r >= lambda^{3/2},
  // so the extension is exact (no cutoff loss) on the band just inside the
  // hole; only the deep core is damped to zero.
  double plateau = std::sqrt(lambda);
  auto cutoff = [plateau](double r) {
    if (r <= plateau) return 1.0;
    if (r >= 1.0) return 0.0;
    double t = std::log(r / plateau) / std::log(1.0 / plateau);
    return 1.0 - (10 * t * t * t - 15 * t * t * t * t + 6 * t * t * t * t * t);
  };

  KelvinExtension out{gptr, MapField(gd, f.dim(), f.ball_valued()), 0.0};
  std::vector<double> buf(f.dim());
  for (std::size_t idx = 0; idx < gd.num_nodes(); ++idx) {
    if (gd.node_class(idx) == NodeClass::outside) continue;
    double x, y;
    gd.node_coords(idx, x, y);
    double r = std::hypot(x, y);
    if (r >= lambda) {
      f.interpolate(x, y, out.extended.at(idx));
    } else {
      double rr = lambda * lambda / (r * r);
      double wx = x * rr, wy = y * rr;  // |w| = lambda^2 / r
      double wr = lambda * lambda / std::max(r, 1e-300);
      if (wr >= 1.0) continue;  // cutoff support excludes the image: zero
      f.interpolate(wx, wy, buf);
      double phi = cutoff(wr);
      for (int c = 0; c < f.dim(); ++c) out.extended(idx, c) = buf[c] * phi;
    }
  }
  double denom = dirichlet_energy(f);
  double numer = dirichlet_energy(out.extended);
  out.energy_ratio = denom > 0 ? std::sqrt(numer / denom) : (numer > 0 ? 1e300 : 0.0);
  return out;
}

EpsilonConstants epsilon_constants(double K0) {
  if (K0 <= 0) throw std::invalid_argument("epsilon_constants: K0 must be > 0");
  EpsilonConstants e{K0, 1.0 / (4.0 * 96.0 * K0 * K0), 0.0};
  e.eps1 = e.eps2 / 17.0;
  return e;
}

ReflectionEnergy reflection_energy_identity(const SymmetrizedSystem& s) {
  const Grid& g = *s.grid;
  Gradient gu = gradient(s.u_tilde);
  ReflectionEnergy out{0, 0, 0};
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    int i, j;
    g.node_ij(idx, i, j);
    double e = g.cell_area(idx) * gu.sq_norm_at(idx);
    if (j < 0) {
      out.lower += e;
    } else if (j > 0) {
      double m2 = 0.0;
      for (int c = 0; c < s.dim(); ++c) m2 += s.u_tilde(idx, c) * s.u_tilde(idx, c);
      out.upper += e;
      out.upper_weighted += e / (m2 * m2);
    }
  }
  return out;
}

}  // namespace fbh

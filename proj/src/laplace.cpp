#include "fbh/laplace.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace fbh {

struct LaplaceSolver::Impl {
  const Grid* grid;
  std::vector<int> unknown_of;  // node index -> unknown id, -1 if Dirichlet/outside
  std::vector<std::size_t> node_of;
  Eigen::SparseMatrix<double> A;  // -Laplacian, SPD
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

LaplaceSolver::LaplaceSolver(const Grid& g) : impl_(std::make_unique<Impl>()) {
  impl_->grid = &g;
  impl_->unknown_of.assign(g.num_nodes(), -1);
  for (std::size_t idx : g.interior()) {
    impl_->unknown_of[idx] = (int)impl_->node_of.size();
    impl_->node_of.push_back(idx);
  }
  const int n = (int)impl_->node_of.size();
  if (n == 0) throw std::runtime_error("LaplaceSolver: no interior nodes (underresolved grid)");

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * n);
  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  for (int k = 0; k < n; ++k) {
    std::size_t idx = impl_->node_of[k];
    int i, j;
    g.node_ij(idx, i, j);
    trip.emplace_back(k, k, 4.0);
    for (int d = 0; d < 4; ++d) {
      int ii = i + di[d], jj = j + dj[d];
      // interior nodes have all four neighbours in-domain by construction
      int uk = impl_->unknown_of[g.index(ii, jj)];
      if (uk >= 0) trip.emplace_back(k, uk, -1.0);
    }
  }
  impl_->A.resize(n, n);
  impl_->A.setFromTriplets(trip.begin(), trip.end());
  impl_->ldlt.compute(impl_->A);
  if (impl_->ldlt.info() != Eigen::Success)
    throw std::runtime_error("LaplaceSolver: factorisation failed (singular system)");
}

LaplaceSolver::~LaplaceSolver() = default;
LaplaceSolver::LaplaceSolver(LaplaceSolver&&) noexcept = default;
LaplaceSolver& LaplaceSolver::operator=(LaplaceSolver&&) noexcept = default;

const Grid& LaplaceSolver::grid() const { return *impl_->grid; }

MapField LaplaceSolver::solve_poisson(const MapField& rhs, const MapField& bdata) const {
  const Grid& g = *impl_->grid;
  const int dim = bdata.dim();
  const int n = (int)impl_->node_of.size();
  const double h2 = g.h() * g.h();
  MapField out(g, dim, bdata.ball_valued());

  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  Eigen::VectorXd b(n), sol(n);
  for (int c = 0; c < dim; ++c) {
    for (int k = 0; k < n; ++k) {
      std::size_t idx = impl_->node_of[k];
      int i, j;
      g.node_ij(idx, i, j);
      double acc = -h2 * rhs(idx, c);  // A = -Delta
      for (int d = 0; d < 4; ++d) {
        std::size_t nidx = g.index(i + di[d], j + dj[d]);
        if (impl_->unknown_of[nidx] < 0) acc += bdata(nidx, c);
      }
      b[k] = acc;
    }
    sol = impl_->ldlt.solve(b);
    for (int k = 0; k < n; ++k) out(impl_->node_of[k], c) = sol[k];
  }
  // copy Dirichlet values
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    NodeClass nc = g.node_class(idx);
    if (nc == NodeClass::arc_boundary || nc == NodeClass::flat_boundary)
      for (int c = 0; c < dim; ++c) out(idx, c) = bdata(idx, c);
  }
  return out;
}

MapField LaplaceSolver::solve_laplace(const MapField& bdata) const {
  MapField zero(*impl_->grid, bdata.dim());
  return solve_poisson(zero, bdata);
}

void LaplaceSolver::energy_gradient_at(const MapField& u, std::size_t idx,
                                       std::span<double> out) const {
  const Grid& g = *impl_->grid;
  int i, j;
  g.node_ij(idx, i, j);
  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  for (int c = 0; c < u.dim(); ++c) out[c] = 0.0;
  for (int d = 0; d < 4; ++d) {
    int ii = i + di[d], jj = j + dj[d];
    if (!g.in_domain(ii, jj)) continue;
    std::size_t nidx = g.index(ii, jj);
    for (int c = 0; c < u.dim(); ++c) out[c] += u(idx, c) - u(nidx, c);
  }
  for (int c = 0; c < u.dim(); ++c) out[c] /= g.h();
}

}  // namespace fbh

#include "fbh/lorentz.hpp"

#include <algorithm>
#include <cmath>

namespace fbh {

double lorentz_norm(std::vector<WeightedSample> s, LorentzKind kind) {
  if (s.empty()) throw std::invalid_argument("lorentz_norm: empty region");
  for (auto& ws : s) ws.value = std::abs(ws.value);

  if (kind == LorentzKind::L2) {
    double acc = 0.0;
    for (const auto& ws : s) acc += ws.value * ws.value * ws.area;
    return std::sqrt(acc);
  }

  std::sort(s.begin(), s.end(),
            [](const WeightedSample& a, const WeightedSample& b) { return a.value > b.value; });

  if (kind == LorentzKind::L2_weak) {
    double mu = 0.0, best = 0.0;
    for (const auto& ws : s) {
      mu += ws.area;
      best = std::max(best, ws.value * std::sqrt(mu));
    }
    return best;
  }

  // L2_1: sum over value steps of mu^{1/2} * (f_k - f_{k+1}), f_{N+1} = 0.
  double mu = 0.0, acc = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    mu += s[k].area;
    double next = (k + 1 < s.size()) ? s[k + 1].value : 0.0;
    acc += std::sqrt(mu) * (s[k].value - next);
  }
  return acc;
}

double lorentz_norm(const ScalarField& f, LorentzKind kind,
                    const std::optional<RegionPred>& region) {
  const Grid& g = f.grid();
  std::vector<WeightedSample> samples;
  samples.reserve(g.num_nodes());
  for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
    if (g.node_class(idx) == NodeClass::outside) continue;
    if (region) {
      double x, y;
      g.node_coords(idx, x, y);
      if (!(*region)(x, y)) continue;
    }
    samples.push_back({f(idx, 0), g.cell_area(idx)});
  }
  return lorentz_norm(std::move(samples), kind);
}

}  // namespace fbh

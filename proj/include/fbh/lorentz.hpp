#pragma once

#include <vector>

#include "fbh/calculus.hpp"

namespace fbh {

enum class LorentzKind { L2_weak, L2_1, L2 };

struct WeightedSample {
  double value;  // |f| at the sample
  double area;   // quadrature weight
};

/// Norms from the area-weighted decreasing rearrangement:
///   L2_weak = sup_t t mu{|f|>t}^{1/2}
///   L2_1    = int_0^inf mu{|f|>t}^{1/2} dt
///   L2      = (sum |f|^2 area)^{1/2}
double lorentz_norm(std::vector<WeightedSample> samples, LorentzKind kind);

/// Norm of a scalar field over a sub-region of its grid (cells weighted by
/// their cut-cell area, restricted to region if given).
double lorentz_norm(const ScalarField& f, LorentzKind kind,
                    const std::optional<RegionPred>& region = std::nullopt);

}  // namespace fbh

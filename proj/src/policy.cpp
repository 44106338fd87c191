#include "binpick/learn.hpp"

namespace binpick {

PolicyChoice policy_select(const GroundTruthTensor& pred) {
  const GridSpec& g = pred.grid();
  PolicyChoice best{0, 0, -1.0};
  for (int i = 0; i < pred.cell_count(); ++i) {
    const auto c = pred.cell(i);
    for (int j = 0; j < g.grasp_count; ++j) {
      const double score = static_cast<double>(c[g.success(j)]) * c[GridSpec::kP] * c[GridSpec::kV] * c[g.ga()] *
                           c[g.gu()] * c[g.ge()];
      if (score > best.score) best = {i, j, score};
    }
  }
  return best;
}

}  // namespace binpick

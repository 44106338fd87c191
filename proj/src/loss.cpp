#include <algorithm>
#include <cmath>

#include "binpick/error.hpp"
#include "binpick/learn.hpp"

namespace binpick {
namespace {

constexpr double kEps = LossWeights::kEpsilon;

double bce_grad(double prediction, double target) {
  if (prediction < kEps || prediction > 1.0 - kEps) return 0.0;
  return -target / prediction + (1.0 - target) / (1.0 - prediction);
}

void check_shape(std::size_t pred_size, const GroundTruthTensor& gt) {
  if (pred_size != gt.values().size()) {
    throw DataError("prediction has " + std::to_string(pred_size) + " values, ground truth " +
                    std::to_string(gt.values().size()));
  }
}

void check_grid(const GroundTruthTensor& pred, const GroundTruthTensor& gt) {
  const GridSpec& a = pred.grid();
  const GridSpec& b = gt.grid();
  if (a.cells != b.cells || a.channels() != b.channels() || a.grasp_count != b.grasp_count) {
    throw DataError("prediction and ground truth use different grids");
  }
}

std::vector<double> widen(const GroundTruthTensor& t) { return {t.values().begin(), t.values().end()}; }

/// Visits every loss term of every cell. `term(index, kind, weight)` gets the
/// flat value index, whether the term is a BCE or a squared error, and its
/// total weight (including the gt p mask).
template <class F>
void for_each_term(const GroundTruthTensor& gt, const LossWeights& w, const LossMask& mask, F&& term) {
  const GridSpec& g = gt.grid();
  const int c = g.channels();
  const double w6 = w.success_weight(g.grasp_count);
  for (int i = 0; i < gt.cell_count(); ++i) {
    const auto cell = gt.cell(i);
    const std::size_t base = static_cast<std::size_t>(i) * c;
    term(base + GridSpec::kP, true, w.lambda1);
    const double p = cell[GridSpec::kP];
    if (p == 0.0) continue;
    term(base + GridSpec::kV, true, w.lambda2 * p);
    const double l3 = LossWeights::pose_weight(cell[g.ga()], cell[g.gu()], cell[g.ge()]);
    for (int ch = GridSpec::kX; ch <= GridSpec::kZ; ++ch) term(base + ch, false, l3 * p);
    for (int a = 0; a < g.angle_channels(); ++a) term(base + GridSpec::kPhi1 + a, false, l3 * w.lambda4 * p);
    if (mask.graspability) {
      for (int ch = g.ga(); ch <= g.ge(); ++ch) term(base + ch, true, w.lambda5 * p);
    }
    if (mask.grasp_success) {
      for (int j = 0; j < g.grasp_count; ++j) term(base + g.success(j), true, w6 * p);
    }
  }
}

}  // namespace

void LossWeights::validate() const {
  for (double v : {lambda1, lambda2, lambda4, lambda5}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DataError("loss weights must be positive");
  }
  if (lambda6 && (!(*lambda6 > 0.0) || !std::isfinite(*lambda6))) throw DataError("loss weights must be positive");
}

double bce(double prediction, double target) {
  const double q = std::clamp(prediction, kEps, 1.0 - kEps);
  return -(target * std::log(q) + (1.0 - target) * std::log(1.0 - q));
}

double compute_loss(std::span<const double> pred, const GroundTruthTensor& gt, const LossWeights& w,
                    const LossMask& mask) {
  check_shape(pred.size(), gt);
  w.validate();
  const auto target = gt.values();
  double loss = 0.0;
  for_each_term(gt, w, mask, [&](std::size_t k, bool is_bce, double weight) {
    const double d = pred[k] - target[k];
    loss += weight * (is_bce ? bce(pred[k], target[k]) : d * d);
  });
  return loss;
}

double compute_loss(const GroundTruthTensor& pred, const GroundTruthTensor& gt, const LossWeights& w,
                    const LossMask& mask) {
  check_grid(pred, gt);
  return compute_loss(widen(pred), gt, w, mask);
}

std::vector<double> loss_gradient(std::span<const double> pred, const GroundTruthTensor& gt, const LossWeights& w,
                                  const LossMask& mask) {
  check_shape(pred.size(), gt);
  w.validate();
  const auto target = gt.values();
  std::vector<double> grad(pred.size(), 0.0);
  for_each_term(gt, w, mask, [&](std::size_t k, bool is_bce, double weight) {
    grad[k] += weight * (is_bce ? bce_grad(pred[k], target[k]) : 2.0 * (pred[k] - target[k]));
  });
  return grad;
}

std::vector<double> loss_gradient(const GroundTruthTensor& pred, const GroundTruthTensor& gt, const LossWeights& w,
                                  const LossMask& mask) {
  check_grid(pred, gt);
  return loss_gradient(widen(pred), gt, w, mask);
}

}  // namespace binpick

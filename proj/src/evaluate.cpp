#include <algorithm>
#include <limits>
#include <tuple>

#include "binpick/error.hpp"
#include "binpick/learn.hpp"

namespace binpick {
namespace {

struct GtInstance {
  Pose pose_cam;
  bool eligible = false;
  bool matched = false;
};

struct RankedDetection {
  double score;
  std::size_t scene;
  int cell;
  RankedMatch::Kind kind;
};

/// Instances whose origin lands in the image between the clipping planes.
std::vector<GtInstance> observable_instances(const SceneSample& scene, const CameraModel& cam, double min_visibility) {
  const Pose cam_from_world = cam.pose.inverse();
  std::vector<GtInstance> out;
  for (const SceneInstance& inst : scene.instances) {
    const Pose p = cam_from_world * inst.pose;
    const double z = p.translation.z();
    if (!(z >= cam.near_plane && z <= cam.far_plane)) continue;
    const Eigen::Vector2d px = cam.project(p.translation);
    if (!(px.x() >= 0.0 && px.x() < cam.width && px.y() >= 0.0 && px.y() < cam.height)) continue;
    out.push_back({p, inst.visibility >= min_visibility, false});
  }
  return out;
}

double ratio_or(std::size_t num, std::size_t den, double empty) {
  return den == 0 ? empty : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double average_precision(std::span<const RankedMatch> ranked, std::size_t ground_truth_count) {
  std::size_t tp = 0, fp = 0;
  double sum = 0.0;
  for (const RankedMatch& m : ranked) {
    if (m.kind == RankedMatch::Kind::Ignored) continue;
    if (m.kind == RankedMatch::Kind::TruePositive) {
      ++tp;
      sum += static_cast<double>(tp) / static_cast<double>(tp + fp);
    } else {
      ++fp;
    }
  }
  if (ground_truth_count == 0) return fp == 0 && tp == 0 ? 1.0 : 0.0;
  return sum / static_cast<double>(ground_truth_count);
}

EvalReport evaluate(std::span<const GroundTruthTensor> preds, std::span<const EvalGroundTruth> gts,
                    const PoseDistanceContext& ctx, const EvalThresholds& th) {
  if (preds.size() != gts.size()) throw DataError("prediction and ground-truth scene counts differ");
  if (preds.empty()) throw DataError("no scenes to evaluate");

  EvalReport report;
  report.scenes = preds.size();
  const double max_distance = th.pose_success * ctx.diameter();
  std::vector<RankedDetection> ranked;
  std::size_t pose_hits = 0, policy_hits = 0;
  std::size_t tp = 0, fp = 0, fn = 0;

  for (std::size_t s = 0; s < preds.size(); ++s) {
    const GroundTruthTensor& pred = preds[s];
    const GridSpec& g = pred.grid();
    const GroundTruthTensor gt = encode_ground_truth(gts[s].scene, gts[s].labels, g);

    std::vector<GtInstance> truth = observable_instances(gts[s].scene, g.camera, th.min_visibility);
    report.ground_truth += static_cast<std::size_t>(
        std::count_if(truth.begin(), truth.end(), [](const GtInstance& t) { return t.eligible; }));

    std::vector<ObjectEstimate> dets = decode_tensor(pred, th.detection);
    std::stable_sort(dets.begin(), dets.end(),
                     [](const ObjectEstimate& a, const ObjectEstimate& b) { return a.probability > b.probability; });
    for (const ObjectEstimate& d : dets) {
      GtInstance* nearest = nullptr;
      double best = std::numeric_limits<double>::infinity();
      for (GtInstance& t : truth) {
        if (t.matched) continue;
        const double dist = pose_distance(d.pose, t.pose_cam, ctx);
        if (dist < best) {
          best = dist;
          nearest = &t;
        }
      }
      auto kind = RankedMatch::Kind::FalsePositive;
      if (nearest && best < max_distance) {
        nearest->matched = true;
        ++pose_hits;
        kind = nearest->eligible ? RankedMatch::Kind::TruePositive : RankedMatch::Kind::Ignored;
      }
      ranked.push_back({d.probability, s, d.cell_index(g.cells), kind});
    }
    report.detections += dets.size();

    for (int i = 0; i < pred.cell_count(); ++i) {
      const auto pc = pred.cell(i);
      const auto gc = gt.cell(i);
      const bool detected = pc[GridSpec::kP] > 0.0f && pc[GridSpec::kP] >= th.detection;
      for (int j = 0; j < g.grasp_count; ++j) {
        const bool predicted = detected && pc[g.success(j)] >= th.grasp_success;
        const bool actual = gc[GridSpec::kP] > 0.0f && gc[g.success(j)] >= 0.5f;
        if (predicted && actual) ++tp;
        else if (predicted) ++fp;
        else if (actual) ++fn;
      }
    }

    const PolicyChoice choice = policy_select(pred);
    const auto gc = gt.cell(choice.cell);
    if (gc[GridSpec::kP] > 0.0f && gc[g.success(choice.grasp)] >= 0.5f) ++policy_hits;
  }

  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedDetection& a, const RankedDetection& b) {
    return std::tie(b.score, a.scene, a.cell) < std::tie(a.score, b.scene, b.cell);
  });
  std::vector<RankedMatch> matches;
  matches.reserve(ranked.size());
  for (const RankedDetection& r : ranked) matches.push_back({r.score, r.kind});

  report.pose_success_rate = ratio_or(pose_hits, report.detections, 0.0);
  report.average_precision = average_precision(matches, report.ground_truth);
  report.grasp_precision = ratio_or(tp, tp + fp, 1.0);
  report.grasp_recall = ratio_or(tp, tp + fn, 1.0);
  report.policy_success_rate = ratio_or(policy_hits, report.scenes, 0.0);
  return report;
}

}  // namespace binpick

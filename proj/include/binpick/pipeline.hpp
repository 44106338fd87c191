#pragma once

#include <optional>
#include <vector>

#include "binpick/clustering.hpp"
#include "binpick/io.hpp"
#include "binpick/learn.hpp"

namespace binpick {

struct CameraSettings {
  int width = 128;
  int height = 128;
  double distance = 1.0;  ///< above the bin floor
  std::optional<double> fx, fy, near_plane, far_plane;
};

/// Everything the dataset pipeline needs besides the object and the seed.
struct PipelineConfig {
  int scenes = 10;
  int objects_per_scene = 6;
  std::size_t object_samples = ObjectModel::kDefaultSampleCount;
  GraspGenParams grasps;
  std::size_t cluster_k = 500;
  std::optional<double> orientation_weight;  ///< default 0.1 × sphere radius
  BinSpec bin;
  CameraSettings camera;
  SceneGenParams scene;
  int grid_cells = 16;
  ReachabilityParams reachability;
  TrialSynthesisParams trials;
  LossWeights loss;
  EvalThresholds thresholds;
  int grasp_label_scenes = -1;       ///< scenes (from the first) with grasp labels; −1 = all
  std::vector<int> augment_rotations;  ///< quarter turns
  bool augment_mirror = false;

  void validate() const;
};

/// Reads a config document; every key is optional and unknown keys are rejected.
PipelineConfig config_from_json(const Json& j);
PipelineConfig load_config(const fs::path& path);
Json to_json(const PipelineConfig& c);

CameraModel make_camera(const PipelineConfig& c);
GridSpec make_grid(const PipelineConfig& c, const SymmetryClass& symmetry, int grasp_count);

/// Per-instance graspabilities and success flags (placed ⇒ success) from a trial log.
LabelMap compute_labels(const SceneSample& scene, std::span<const TrialRecord> log, int grasp_count);

struct ManifestEntry {
  std::string id;
  int scene = 0;
  std::string depth;
  std::string mask;         ///< empty for augmented samples
  std::string annotations;  ///< scene record; shared with the source scene for augmented samples
  std::string trials;
  std::string labels;
  std::string tensor;
  bool augmented = false;
  std::string augmentation = "none";
  bool grasp_labels = true;  ///< success channels usable for training
};

/// Paths are relative to `root`, the directory holding the manifest.
struct SampleManifest {
  fs::path root;
  std::string object;
  std::string grasps;
  std::vector<ManifestEntry> samples;

  /// Throws DataError when a referenced file is missing or flags conflict.
  void validate() const;
};

Json to_json(const SampleManifest& m);
SampleManifest manifest_from_json(const Json& j, const fs::path& root);
SampleManifest load_manifest(const fs::path& path);

/// A stage failure, naming the stage and the input it was working on.
class PipelineError : public DataError {
 public:
  PipelineError(std::string stage, std::string input, const std::string& what)
      : DataError("stage " + stage + " (" + input + "): " + what), stage_(std::move(stage)), input_(std::move(input)) {}

  const std::string& stage() const { return stage_; }
  const std::string& input() const { return input_; }

 private:
  std::string stage_;
  std::string input_;
};

/// gen-grasps → cluster → gen-scenes → render → trials → metrics → encode,
/// writing every intermediate under `out_dir`. A pure function of
/// (descriptor, config, seed): reruns produce byte-identical files.
SampleManifest run_pipeline(const ObjectDescriptor& descriptor, const PipelineConfig& config, std::uint64_t seed,
                            const fs::path& out_dir);

}  // namespace binpick

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "binpick/error.hpp"
#include "binpick/grasp.hpp"
#include "binpick/tensor.hpp"
#include "binpick/trials.hpp"

namespace binpick {

namespace fs = std::filesystem;
using Json = nlohmann::json;

/// Writes to a temporary sibling, then renames over `path`.
void write_file_atomic(const fs::path& path, std::string_view bytes);
std::string read_file(const fs::path& path);

// Depth: PFM, single channel, little endian (scale −1), rows bottom to top.
// Background (+inf) is stored as 0 and restored on reading.
std::string encode_pfm(const DepthImage& depth);
DepthImage decode_pfm(std::string_view bytes);
void write_pfm(const DepthImage& depth, const fs::path& path);
DepthImage read_pfm(const fs::path& path);

// Mask: binary PGM with 16-bit big-endian samples (8-bit files are read too).
std::string encode_pgm(const MaskImage& mask);
MaskImage decode_pgm(std::string_view bytes);
void write_pgm(const MaskImage& mask, const fs::path& path);
MaskImage read_pgm(const fs::path& path);

/// Failure reading a tensor file, with a machine-checkable reason.
class TensorFileError : public DataError {
 public:
  enum class Code { BadMagic, UnsupportedVersion, BadHeader, TruncatedPayload, LayoutMismatch, Io };

  TensorFileError(Code code, const std::string& what) : DataError(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

std::string to_string(TensorFileError::Code code);

/// Tensor file: "BPQT", uint32 version, uint32 header length, JSON header
/// (grid, channel names, symmetry, camera), then row-major float32 values,
/// all little endian.
inline constexpr std::uint32_t kTensorFileVersion = 1;
std::string encode_tensor_file(const GroundTruthTensor& t);
GroundTruthTensor decode_tensor_file(std::string_view bytes);
void write_tensor_file(const GroundTruthTensor& t, const fs::path& path);
GroundTruthTensor read_tensor_file(const fs::path& path);

/// Channel names in storage order.
std::vector<std::string> channel_names(const GridSpec& grid);

// JSON records. Every document carries "format" and "version"; readers
// reject other formats and unknown versions.
inline constexpr int kRecordVersion = 1;

Json make_header(std::string_view format);
void check_header(const Json& j, std::string_view format);

Json to_json(const Pose& p);
Pose pose_from_json(const Json& j);
Json to_json(const SymmetryClass& s);
SymmetryClass symmetry_from_json(const Json& j);
Json to_json(const GripperModel& g);
GripperModel gripper_from_json(const Json& j);
Json to_json(const BinSpec& b);
BinSpec bin_from_json(const Json& j);
Json to_json(const CameraModel& c);
CameraModel camera_from_json(const Json& j);

/// Object descriptor: mesh, symmetry, gripper and the hook flag used by the
/// entanglement heuristic. Relative mesh paths resolve against the
/// descriptor's directory.
struct ObjectDescriptor {
  std::string id;
  fs::path mesh;
  SymmetryClass symmetry;
  GripperModel gripper = GripperModel::parallel_jaw();
  bool hook_capable = false;
};

ObjectDescriptor load_descriptor(const fs::path& path);
ObjectDescriptor descriptor_from_json(const Json& j, const fs::path& base_dir = {});
Json to_json(const ObjectDescriptor& d);

/// Loads the mesh and builds the model with the named-stream seed "object".
ObjectModel load_object(const ObjectDescriptor& d, std::uint64_t seed, std::size_t sample_count);

Json to_json(const GraspSet& set);
GraspSet grasps_from_json(const Json& j);

/// Scene annotations: bin, camera and instance poses/visibilities (no rasters).
Json to_json(const SceneSample& scene);
SceneSample scene_from_json(const Json& j);

/// Trial log as JSON lines: a header line, then one record per line.
std::string encode_trial_log(int scene, std::span<const TrialRecord> records);
std::vector<TrialRecord> decode_trial_log(std::string_view text);

Json labels_to_json(int scene, int grasp_count, const LabelMap& labels);
LabelMap labels_from_json(const Json& j, int* grasp_count = nullptr);

/// Pretty-printed JSON with sorted keys and shortest round-trip numbers.
std::string dump_json(const Json& j);
Json parse_json(std::string_view text, const std::string& what);
Json read_json(const fs::path& path);
void write_json(const Json& j, const fs::path& path);

}  // namespace binpick

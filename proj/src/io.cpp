#include "binpick/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace binpick {
namespace {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DataError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad field \"") + key + "\": " + e.what());
  }
}

template <class T>
T field_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return field<T>(j, key);
}

Vec3 vec3_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw DataError(std::string(what) + " must be a 3-vector");
  try {
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } catch (const nlohmann::json::exception&) {
    throw DataError(std::string(what) + " must hold numbers");
  }
}

Json vec3_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(std::string_view in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }
float get_f32(std::string_view in, std::size_t pos) { return std::bit_cast<float>(get_u32(in, pos)); }

/// Whitespace-separated header tokens of a PNM/PFM file; returns the offset
/// just past the single whitespace byte after the last token.
std::size_t read_tokens(std::string_view bytes, int count, std::vector<std::string>& tokens) {
  std::size_t pos = 0;
  while (static_cast<int>(tokens.size()) < count) {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    if (pos >= bytes.size()) throw DataError("truncated image header");
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    tokens.emplace_back(bytes.substr(start, pos - start));
  }
  if (pos >= bytes.size()) throw DataError("truncated image header");
  return pos + 1;
}

int parse_int(const std::string& s, const char* what) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v <= 0) throw DataError(std::string("bad ") + what + ": " + s);
  return v;
}

const char* kSymmetryField = "symmetry";

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw DataError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot move into place: " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string encode_pfm(const DepthImage& depth) {
  std::string out = "Pf\n" + std::to_string(depth.width) + " " + std::to_string(depth.height) + "\n-1.0\n";
  out.reserve(out.size() + depth.data.size() * 4);
  for (int row = depth.height - 1; row >= 0; --row) {
    for (int col = 0; col < depth.width; ++col) {
      const float d = depth.at(col, row);
      put_f32(out, std::isfinite(d) ? d : 0.0f);
    }
  }
  return out;
}

DepthImage decode_pfm(std::string_view bytes) {
  std::vector<std::string> tok;
  const std::size_t pos = read_tokens(bytes, 4, tok);
  if (tok[0] != "Pf") throw DataError("not a single-channel PFM file");
  const int w = parse_int(tok[1], "PFM width");
  const int h = parse_int(tok[2], "PFM height");
  if (tok[3].empty() || tok[3][0] != '-') throw DataError("only little-endian PFM files are supported");
  const std::size_t need = static_cast<std::size_t>(w) * h * 4;
  if (bytes.size() - pos < need) throw DataError("truncated PFM payload");
  DepthImage d(w, h, 0.0f);
  std::size_t at = pos;
  for (int row = h - 1; row >= 0; --row) {
    for (int col = 0; col < w; ++col, at += 4) {
      const float v = get_f32(bytes, at);
      d.at(col, row) = v == 0.0f ? std::numeric_limits<float>::infinity() : v;
    }
  }
  return d;
}

void write_pfm(const DepthImage& depth, const fs::path& path) { write_file_atomic(path, encode_pfm(depth)); }
DepthImage read_pfm(const fs::path& path) { return decode_pfm(read_file(path)); }

std::string encode_pgm(const MaskImage& mask) {
  std::string out = "P5\n" + std::to_string(mask.width) + " " + std::to_string(mask.height) + "\n65535\n";
  out.reserve(out.size() + mask.data.size() * 2);
  for (std::uint16_t v : mask.data) {
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

MaskImage decode_pgm(std::string_view bytes) {
  std::vector<std::string> tok;
  const std::size_t pos = read_tokens(bytes, 4, tok);
  if (tok[0] != "P5") throw DataError("not a binary PGM file");
  const int w = parse_int(tok[1], "PGM width");
  const int h = parse_int(tok[2], "PGM height");
  const int maxval = parse_int(tok[3], "PGM maxval");
  if (maxval > 65535) throw DataError("bad PGM maxval");
  const std::size_t bpp = maxval > 255 ? 2 : 1;
  if (bytes.size() - pos < static_cast<std::size_t>(w) * h * bpp) throw DataError("truncated PGM payload");
  MaskImage m(w, h, 0);
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos + i * bpp);
    m.data[i] = bpp == 2 ? static_cast<std::uint16_t>((p[0] << 8) | p[1]) : p[0];
  }
  return m;
}

void write_pgm(const MaskImage& mask, const fs::path& path) { write_file_atomic(path, encode_pgm(mask)); }
MaskImage read_pgm(const fs::path& path) { return decode_pgm(read_file(path)); }

std::string to_string(TensorFileError::Code code) {
  using C = TensorFileError::Code;
  switch (code) {
    case C::BadMagic: return "bad magic";
    case C::UnsupportedVersion: return "unsupported version";
    case C::BadHeader: return "bad header";
    case C::TruncatedPayload: return "truncated payload";
    case C::LayoutMismatch: return "layout mismatch";
    case C::Io: return "io";
  }
  return "io";
}

std::vector<std::string> channel_names(const GridSpec& grid) {
  std::vector<std::string> names = {"p", "v", "x", "y", "z", "phi1", "phi2"};
  if (grid.has_phi3()) names.emplace_back("phi3");
  for (const char* n : {"g_a", "g_u", "g_e"}) names.emplace_back(n);
  for (int j = 0; j < grid.grasp_count; ++j) names.push_back("s_" + std::to_string(j + 1));
  return names;
}

std::string encode_tensor_file(const GroundTruthTensor& t) {
  const GridSpec& g = t.grid();
  Json header = {{"cells", g.cells},
                 {"grasp_count", g.grasp_count},
                 {"channels", g.channels()},
                 {"layout", channel_names(g)},
                 {kSymmetryField, to_json(g.symmetry)},
                 {"width", g.camera.width},
                 {"height", g.camera.height},
                 {"camera", to_json(g.camera)}};
  const std::string text = header.dump();
  std::string out = "BPQT";
  put_u32(out, kTensorFileVersion);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  out.reserve(out.size() + t.values().size() * 4);
  for (float v : t.values()) put_f32(out, v);
  return out;
}

GroundTruthTensor decode_tensor_file(std::string_view bytes) {
  using C = TensorFileError::Code;
  if (bytes.size() < 4 || bytes.substr(0, 4) != "BPQT") throw TensorFileError(C::BadMagic, "not a tensor file");
  if (bytes.size() < 12) throw TensorFileError(C::BadHeader, "tensor file header is cut short");
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kTensorFileVersion) {
    throw TensorFileError(C::UnsupportedVersion, "unsupported tensor file version " + std::to_string(version));
  }
  const std::uint32_t header_len = get_u32(bytes, 8);
  if (bytes.size() - 12 < header_len) throw TensorFileError(C::BadHeader, "tensor file header is cut short");

  GridSpec g;
  std::vector<std::string> layout;
  int channels = 0;
  try {
    const Json h = Json::parse(bytes.substr(12, header_len));
    g.cells = field<int>(h, "cells");
    g.grasp_count = field<int>(h, "grasp_count");
    g.symmetry = symmetry_from_json(h.at(kSymmetryField));
    g.camera = camera_from_json(h.at("camera"));
    channels = field<int>(h, "channels");
    layout = field<std::vector<std::string>>(h, "layout");
    if (field<int>(h, "width") != g.camera.width || field<int>(h, "height") != g.camera.height) {
      throw DataError("image size disagrees with the camera");
    }
    g.validate();
  } catch (const TensorFileError&) {
    throw;
  } catch (const std::exception& e) {
    throw TensorFileError(C::BadHeader, std::string("bad tensor header: ") + e.what());
  }
  if (channels != g.channels() || layout != channel_names(g)) {
    throw TensorFileError(C::LayoutMismatch, "channel layout does not match the declared symmetry");
  }

  const std::size_t cells = static_cast<std::size_t>(g.cells) * g.cells;
  const std::size_t expected = cells * g.channels() * 4;
  const std::size_t payload = bytes.size() - 12 - header_len;
  if (payload != expected) {
    // A payload sized for the other layout (with or without phi3) or an
    // oversized one is a mismatch; anything else short is a truncation.
    const std::size_t other = cells * (g.has_phi3() ? g.channels() - 1 : g.channels() + 1) * 4;
    if (payload > expected || payload == other) {
      throw TensorFileError(C::LayoutMismatch, "payload holds " + std::to_string(payload / 4) + " values, layout needs " +
                                                   std::to_string(expected / 4));
    }
    throw TensorFileError(C::TruncatedPayload, "truncated payload");
  }
  std::vector<float> values(cells * g.channels());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = get_f32(bytes, 12 + header_len + 4 * i);
  return {g, std::move(values)};
}

void write_tensor_file(const GroundTruthTensor& t, const fs::path& path) {
  write_file_atomic(path, encode_tensor_file(t));
}

GroundTruthTensor read_tensor_file(const fs::path& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const DataError& e) {
    throw TensorFileError(TensorFileError::Code::Io, e.what());
  }
  return decode_tensor_file(bytes);
}

Json make_header(std::string_view format) { return {{"format", format}, {"version", kRecordVersion}}; }

void check_header(const Json& j, std::string_view format) {
  if (!j.is_object() || !j.contains("format") || !j["format"].is_string() || j["format"].get<std::string>() != format) {
    throw DataError("expected a " + std::string(format) + " document");
  }
  const int version = field<int>(j, "version");
  if (version != kRecordVersion) {
    throw DataError("unsupported " + std::string(format) + " version " + std::to_string(version));
  }
}

Json to_json(const Pose& p) {
  const Quat& q = p.rotation;
  return {{"t", vec3_to_json(p.translation)}, {"q", Json::array({q.w(), q.x(), q.y(), q.z()})}};
}

Pose pose_from_json(const Json& j) {
  const Vec3 t = vec3_from_json(j.at("t"), "translation");
  const auto q = field<std::vector<double>>(j, "q");
  if (q.size() != 4) throw DataError("quaternion must have 4 components (w, x, y, z)");
  const Quat raw(q[0], q[1], q[2], q[3]);
  const double n = raw.norm();
  if (!(n > 1e-12) || !std::isfinite(n)) throw DataError("quaternion has zero length");
  // Already-unit quaternions are kept bit for bit so files round-trip exactly.
  Pose p;
  p.rotation = std::abs(n - 1.0) <= 1e-12 ? raw : raw.normalized();
  p.translation = t;
  return p;
}

Json to_json(const SymmetryClass& s) {
  Json j = {{"kind", to_string(s.kind)}, {"mirror_plane", s.mirror_plane}};
  if (s.kind == SymmetryClass::Kind::Cyclic) j["order"] = s.order;
  return j;
}

SymmetryClass symmetry_from_json(const Json& j) {
  SymmetryClass s;
  switch (symmetry_kind_from_string(field<std::string>(j, "kind"))) {
    case SymmetryClass::Kind::None: break;
    case SymmetryClass::Kind::Cyclic: s = SymmetryClass::cyclic(field<int>(j, "order")); break;
    case SymmetryClass::Kind::Revolution: s = SymmetryClass::revolution(false); break;
    case SymmetryClass::Kind::RevolutionWithPlane: s = SymmetryClass::revolution(true); break;
  }
  s.mirror_plane = field_or<bool>(j, "mirror_plane", false);
  return s;
}

Json to_json(const GripperModel& g) {
  Json j = {{"kind", to_string(g.kind)}};
  if (g.is_parallel_jaw()) {
    j["opening"] = g.opening;
    j["standoff"] = g.standoff;
  } else {
    if (g.footprint == GripperModel::Footprint::Cylinder) {
      j["radius"] = g.footprint_radius;
    } else {
      j["extents"] = Json::array({g.footprint_extents.x(), g.footprint_extents.y()});
    }
    j["footprint_height"] = g.footprint_height;
    j["body_height"] = g.body_height;
  }
  return j;
}

GripperModel gripper_from_json(const Json& j) {
  GripperModel g;
  switch (gripper_kind_from_string(field<std::string>(j, "kind"))) {
    case GripperModel::Kind::ParallelJaw:
      g = GripperModel::parallel_jaw(field_or<double>(j, "opening", 0.085));
      g.standoff = field_or<double>(j, "standoff", g.standoff);
      break;
    case GripperModel::Kind::Suction:
    case GripperModel::Kind::Magnetic:
      if (j.contains("extents")) {
        const auto e = field<std::vector<double>>(j, "extents");
        if (e.size() != 2) throw DataError("footprint extents must be [x, y]");
        g = GripperModel::magnet({e[0], e[1], 0.0});
      } else {
        g = GripperModel::suction_cup(field_or<double>(j, "radius", 0.01));
      }
      g.kind = gripper_kind_from_string(field<std::string>(j, "kind"));
      g.footprint_height = field_or<double>(j, "footprint_height", g.footprint_height);
      g.body_height = field_or<double>(j, "body_height", g.body_height);
      break;
  }
  g.validate();
  return g;
}

Json to_json(const BinSpec& b) {
  return {{"size_x", b.size_x}, {"size_y", b.size_y}, {"wall_height", b.wall_height}, {"wall_thickness", b.wall_thickness}};
}

BinSpec bin_from_json(const Json& j) {
  BinSpec b;
  b.size_x = field_or<double>(j, "size_x", b.size_x);
  b.size_y = field_or<double>(j, "size_y", b.size_y);
  b.wall_height = field_or<double>(j, "wall_height", b.wall_height);
  b.wall_thickness = field_or<double>(j, "wall_thickness", b.wall_thickness);
  b.validate();
  return b;
}

Json to_json(const CameraModel& c) {
  return {{"fx", c.fx},        {"fy", c.fy},          {"cx", c.cx},         {"cy", c.cy},
          {"width", c.width},  {"height", c.height},  {"near", c.near_plane}, {"far", c.far_plane},
          {"pose", to_json(c.pose)}};
}

CameraModel camera_from_json(const Json& j) {
  CameraModel c;
  c.fx = field<double>(j, "fx");
  c.fy = field<double>(j, "fy");
  c.cx = field<double>(j, "cx");
  c.cy = field<double>(j, "cy");
  c.width = field<int>(j, "width");
  c.height = field<int>(j, "height");
  c.near_plane = field<double>(j, "near");
  c.far_plane = field<double>(j, "far");
  c.pose = pose_from_json(j.at("pose"));
  c.validate();
  return c;
}

ObjectDescriptor descriptor_from_json(const Json& j, const fs::path& base_dir) {
  check_header(j, "binpick.object");
  ObjectDescriptor d;
  d.id = field<std::string>(j, "id");
  if (d.id.empty()) throw DataError("object id is empty");
  d.mesh = field<std::string>(j, "mesh");
  if (d.mesh.is_relative() && !base_dir.empty()) d.mesh = base_dir / d.mesh;
  d.symmetry = j.contains(kSymmetryField) ? symmetry_from_json(j.at(kSymmetryField)) : SymmetryClass::none();
  if (j.contains("gripper")) d.gripper = gripper_from_json(j.at("gripper"));
  d.hook_capable = field_or<bool>(j, "hook_capable", false);
  return d;
}

ObjectDescriptor load_descriptor(const fs::path& path) {
  return descriptor_from_json(read_json(path), path.parent_path());
}

Json to_json(const ObjectDescriptor& d) {
  Json j = make_header("binpick.object");
  j["id"] = d.id;
  j["mesh"] = d.mesh.generic_string();
  j[kSymmetryField] = to_json(d.symmetry);
  j["gripper"] = to_json(d.gripper);
  j["hook_capable"] = d.hook_capable;
  return j;
}

ObjectModel load_object(const ObjectDescriptor& d, std::uint64_t seed, std::size_t sample_count) {
  if (!fs::exists(d.mesh)) throw DataError("mesh file not found: " + d.mesh.string());
  return ObjectModel::build(d.id, load_obj(d.mesh), d.symmetry, stream_seed(seed, "object"), sample_count,
                            d.hook_capable);
}

Json to_json(const GraspSet& set) {
  Json j = make_header("binpick.grasps");
  j["object"] = set.object_id;
  j["gripper"] = to_json(set.gripper);
  Json arr = Json::array();
  for (const Grasp& g : set.grasps) {
    Json e = to_json(g.pose);
    e["id"] = g.id;
    e["width"] = g.width;
    e["pair"] = g.pair;
    e["rotation_step"] = g.rotation_step;
    e["source_id"] = g.source_id;
    arr.push_back(std::move(e));
  }
  j["grasps"] = std::move(arr);
  return j;
}

GraspSet grasps_from_json(const Json& j) {
  check_header(j, "binpick.grasps");
  GraspSet set;
  set.object_id = field<std::string>(j, "object");
  set.gripper = gripper_from_json(j.at("gripper"));
  for (const Json& e : field<Json>(j, "grasps")) {
    Grasp g;
    g.id = field<int>(e, "id");
    g.pose = pose_from_json(e);
    g.width = field_or<double>(e, "width", 0.0);
    g.pair = field_or<int>(e, "pair", -1);
    g.rotation_step = field_or<int>(e, "rotation_step", 0);
    g.source_id = field_or<int>(e, "source_id", -1);
    if (g.id != static_cast<int>(set.grasps.size())) throw DataError("grasp ids must be dense and in order");
    set.grasps.push_back(g);
  }
  return set;
}

Json to_json(const SceneSample& scene) {
  Json j = make_header("binpick.scene");
  j["id"] = scene.id;
  j["bin"] = scene.bin ? to_json(*scene.bin) : Json(nullptr);
  j["camera"] = to_json(scene.camera);
  Json arr = Json::array();
  for (const SceneInstance& inst : scene.instances) {
    Json e = to_json(inst.pose);
    e["id"] = inst.id;
    e["object"] = inst.object;
    e["visibility"] = inst.visibility;
    arr.push_back(std::move(e));
  }
  j["instances"] = std::move(arr);
  return j;
}

SceneSample scene_from_json(const Json& j) {
  check_header(j, "binpick.scene");
  SceneSample s;
  s.id = field<int>(j, "id");
  if (j.contains("bin") && !j["bin"].is_null()) s.bin = bin_from_json(j["bin"]);
  s.camera = camera_from_json(j.at("camera"));
  for (const Json& e : field<Json>(j, "instances")) {
    SceneInstance inst;
    inst.id = field<int>(e, "id");
    inst.object = field<std::string>(e, "object");
    inst.pose = pose_from_json(e);
    inst.visibility = field<double>(e, "visibility");
    if (!(inst.visibility >= 0.0 && inst.visibility <= 1.0)) throw DataError("visibility outside [0, 1]");
    s.instances.push_back(inst);
  }
  return s;
}

namespace {

Json optional_bool(const std::optional<bool>& b) { return b ? Json(*b) : Json(nullptr); }

std::optional<bool> optional_bool_from(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return field<bool>(j, key);
}

}  // namespace

std::string encode_trial_log(int scene, std::span<const TrialRecord> records) {
  Json header = make_header("binpick.trials");
  header["scene"] = scene;
  header["records"] = records.size();
  std::string out = header.dump() + "\n";
  for (const TrialRecord& r : records) {
    Json e = {{"scene", r.scene},
              {"instance", r.instance},
              {"grasp", r.grasp},
              {"collision_free", r.collision_free},
              {"lifted", optional_bool(r.lifted)},
              {"placed", optional_bool(r.placed)},
              {"entangled", optional_bool(r.entangled)},
              {"executed", r.executed}};
    Json d = Json::array();
    for (const Displacement& x : r.displacements) d.push_back({{"instance", x.instance}, {"delta", vec3_to_json(x.delta)}});
    e["displacements"] = std::move(d);
    out += e.dump() + "\n";
  }
  return out;
}

std::vector<TrialRecord> decode_trial_log(std::string_view text) {
  std::vector<TrialRecord> out;
  std::size_t expected = 0;
  bool have_header = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const Json j = parse_json(line, "trial log line " + std::to_string(line_no));
    if (!have_header) {
      check_header(j, "binpick.trials");
      expected = field<std::size_t>(j, "records");
      have_header = true;
      continue;
    }
    TrialRecord r;
    r.scene = field<int>(j, "scene");
    r.instance = field<int>(j, "instance");
    r.grasp = field<int>(j, "grasp");
    r.collision_free = field<bool>(j, "collision_free");
    r.lifted = optional_bool_from(j, "lifted");
    r.placed = optional_bool_from(j, "placed");
    r.entangled = optional_bool_from(j, "entangled");
    r.executed = field_or<bool>(j, "executed", false);
    for (const Json& d : field<Json>(j, "displacements")) {
      r.displacements.push_back({field<int>(d, "instance"), vec3_from_json(d.at("delta"), "displacement")});
    }
    r.validate();
    out.push_back(std::move(r));
  }
  if (!have_header) throw DataError("trial log has no header line");
  if (out.size() != expected) throw DataError("trial log is truncated");
  return out;
}

Json labels_to_json(int scene, int grasp_count, const LabelMap& labels) {
  Json j = make_header("binpick.labels");
  j["scene"] = scene;
  j["grasp_count"] = grasp_count;
  Json arr = Json::array();
  for (const auto& [id, lab] : labels) {
    std::vector<int> flags(lab.success.begin(), lab.success.end());
    arr.push_back({{"id", id},
                   {"g_a", lab.graspability.accessibility},
                   {"g_u", lab.graspability.unrest},
                   {"g_e", lab.graspability.entanglement},
                   {"success", flags}});
  }
  j["instances"] = std::move(arr);
  return j;
}

LabelMap labels_from_json(const Json& j, int* grasp_count) {
  check_header(j, "binpick.labels");
  const int count = field<int>(j, "grasp_count");
  if (grasp_count) *grasp_count = count;
  LabelMap out;
  for (const Json& e : field<Json>(j, "instances")) {
    InstanceLabels lab;
    lab.graspability = {field<double>(e, "g_a"), field<double>(e, "g_u"), field<double>(e, "g_e")};
    for (int f : field<std::vector<int>>(e, "success")) {
      if (f != 0 && f != 1) throw DataError("success flags must be 0 or 1");
      lab.success.push_back(static_cast<std::uint8_t>(f));
    }
    if (static_cast<int>(lab.success.size()) != count) throw DataError("success flag count differs from grasp_count");
    out[field<int>(e, "id")] = std::move(lab);
  }
  return out;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(what + ": " + e.what());
  }
}

Json read_json(const fs::path& path) { return parse_json(read_file(path), path.string()); }

void write_json(const Json& j, const fs::path& path) { write_file_atomic(path, dump_json(j)); }

}  // namespace binpick

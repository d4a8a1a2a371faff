#include "xrauthor/bundle/glb.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

#include <nlohmann/json.hpp>

#include "xrauthor/common/sha256.hpp"

namespace xrauthor::bundle {

namespace {

using nlohmann::json;

constexpr std::uint32_t kMagic = 0x46546C67;      // "glTF"
constexpr std::uint32_t kJsonChunk = 0x4E4F534A;  // "JSON"
constexpr size_t kHeaderSize = 12;
constexpr size_t kChunkHeaderSize = 8;

std::uint32_t read_u32(std::span<const std::uint8_t> bytes, size_t offset) {
  return static_cast<std::uint32_t>(bytes[offset]) | static_cast<std::uint32_t>(bytes[offset + 1]) << 8 |
         static_cast<std::uint32_t>(bytes[offset + 2]) << 16 | static_cast<std::uint32_t>(bytes[offset + 3]) << 24;
}

[[noreturn]] void malformed(const std::string& why) { throw GlbError("MalformedJsonChunk", why); }

const json& accessor_at(const json& doc, const json& index) {
  if (!index.is_number_unsigned()) malformed("accessor reference is not a non-negative integer");
  const auto accessors = doc.find("accessors");
  const auto i = index.get<std::uint64_t>();
  if (accessors == doc.end() || !accessors->is_array() || i >= accessors->size()) {
    malformed("accessor " + std::to_string(i) + " does not exist");
  }
  const auto& accessor = (*accessors)[i];
  if (!accessor.is_object() || !accessor.contains("count") || !accessor["count"].is_number_unsigned()) {
    malformed("accessor " + std::to_string(i) + " lacks a count");
  }
  return accessor;
}

std::uint64_t primitive_triangles(std::uint64_t mode, std::uint64_t vertex_count) {
  switch (mode) {
    case 4: return vertex_count / 3;
    case 5:
    case 6: return vertex_count >= 3 ? vertex_count - 2 : 0;
    default: return 0;
  }
}

bool read_vec3(const json& accessor, const char* key, Vec3& out) {
  const auto it = accessor.find(key);
  if (it == accessor.end() || !it->is_array() || it->size() != 3) return false;
  for (const auto& v : *it) {
    if (!v.is_number()) return false;
  }
  out = Vec3{(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>()};
  return true;
}

}  // namespace

AssetMeta validate_glb(std::span<const std::uint8_t> bytes, AssetSource source) {
  if (bytes.size() < 4 || read_u32(bytes, 0) != kMagic) throw GlbError("BadMagic", "missing glTF magic");
  if (bytes.size() < kHeaderSize) {
    throw GlbError("LengthMismatch", "file is shorter than the 12-byte header");
  }
  const auto version = read_u32(bytes, 4);
  if (version != 2) throw GlbError("UnsupportedVersion", "container version " + std::to_string(version));
  const auto declared = read_u32(bytes, 8);
  if (declared != bytes.size()) {
    throw GlbError("LengthMismatch",
                   "header declares " + std::to_string(declared) + " bytes, got " + std::to_string(bytes.size()));
  }

  if (bytes.size() < kHeaderSize + kChunkHeaderSize) malformed("no JSON chunk");
  const auto chunk_length = read_u32(bytes, 12);
  if (read_u32(bytes, 16) != kJsonChunk) malformed("first chunk is not JSON");
  if (chunk_length % 4 != 0) malformed("JSON chunk length is not 4-byte aligned");
  if (chunk_length > bytes.size() - kHeaderSize - kChunkHeaderSize) malformed("JSON chunk overruns the file");

  const auto* begin = reinterpret_cast<const char*>(bytes.data() + kHeaderSize + kChunkHeaderSize);
  json doc;
  try {
    doc = json::parse(begin, begin + chunk_length);
  } catch (const json::exception& e) {
    malformed(std::string("JSON chunk does not parse: ") + e.what());
  }
  if (!doc.is_object()) malformed("JSON chunk is not an object");
  const auto asset = doc.find("asset");
  if (asset == doc.end() || !asset->is_object() || !asset->contains("version") || !(*asset)["version"].is_string()) {
    malformed("asset.version is missing");
  }

  const auto meshes = doc.find("meshes");
  if (meshes == doc.end() || !meshes->is_array() || meshes->empty()) throw GlbError("NoMeshes", "no meshes");

  AssetMeta meta;
  meta.byte_length = bytes.size();
  meta.gltf_version = 2;
  meta.mesh_count = static_cast<int>(meshes->size());
  meta.source = source;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  Vec3 lo{kInf, kInf, kInf};
  Vec3 hi{-kInf, -kInf, -kInf};
  bool have_bounds = false;

  for (const auto& mesh : *meshes) {
    const auto prims = mesh.is_object() ? mesh.find("primitives") : mesh.end();
    if (prims == mesh.end() || !prims->is_array() || prims->empty()) malformed("mesh without primitives");
    for (const auto& prim : *prims) {
      if (!prim.is_object() || !prim.contains("attributes") || !prim["attributes"].is_object()) {
        malformed("primitive without attributes");
      }
      const auto& attributes = prim["attributes"];
      const json* position = nullptr;
      if (attributes.contains("POSITION")) position = &accessor_at(doc, attributes["POSITION"]);

      std::uint64_t vertex_count = 0;
      if (prim.contains("indices")) {
        vertex_count = accessor_at(doc, prim["indices"])["count"].get<std::uint64_t>();
      } else if (position) {
        vertex_count = (*position)["count"].get<std::uint64_t>();
      }
      const auto mode = prim.value("mode", std::uint64_t{4});
      meta.triangle_count += primitive_triangles(mode, vertex_count);

      Vec3 pmin, pmax;
      if (position && read_vec3(*position, "min", pmin) && read_vec3(*position, "max", pmax)) {
        if (pmin.x > pmax.x || pmin.y > pmax.y || pmin.z > pmax.z) malformed("POSITION min exceeds max");
        lo = Vec3{std::min(lo.x, pmin.x), std::min(lo.y, pmin.y), std::min(lo.z, pmin.z)};
        hi = Vec3{std::max(hi.x, pmax.x), std::max(hi.y, pmax.y), std::max(hi.z, pmax.z)};
        have_bounds = true;
      }
    }
  }
  if (have_bounds) meta.bounding_box = BoundingBox{lo, hi};
  meta.sha256 = sha256_hex(bytes);
  return meta;
}

}  // namespace xrauthor::bundle

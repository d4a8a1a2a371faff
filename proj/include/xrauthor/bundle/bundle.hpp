#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/common/time.hpp"
#include "xrauthor/common/types.hpp"

namespace xrauthor::bundle {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kModelFile = "model.glb";
inline constexpr const char* kTutorFile = "tutor.json";

// kind() is one of IoError, InvariantViolation, MissingFile, DigestMismatch,
// SchemaVersionUnknown.
class BundleError : public Error {
 public:
  BundleError(std::string kind, const std::string& message) : Error(std::move(kind), message) {}
};

struct BundleManifest {
  std::string bundle_id;
  int schema_version = kSchemaVersion;
  AuthoringRequest request;
  ContentSpec spec;
  std::vector<SafetyVerdict> verdicts;
  TutorPack tutor_pack;  // stored in tutor.json
  AssetMeta asset;
  std::string asset_file = kModelFile;
  Timestamp created_at{};

  bool operator==(const BundleManifest&) const = default;
};

// Everything a finished job contributes. Optional parts are checked by
// write_bundle so that an incomplete job is rejected with InvariantViolation.
struct BundleInputs {
  std::string bundle_id;
  std::optional<AuthoringRequest> request;
  std::optional<ContentSpec> spec;
  std::vector<SafetyVerdict> verdicts;
  std::optional<TutorPack> tutor_pack;
  std::optional<AssetMeta> asset;
  std::vector<std::uint8_t> asset_bytes;
  Timestamp created_at{};
};

std::vector<std::string> problems(const BundleInputs& inputs);

// Writes model.glb, tutor.json and finally manifest.json into `dir`, each
// through a temporary file and rename. Returns the manifest as written.
BundleManifest write_bundle(const std::filesystem::path& dir, const BundleInputs& inputs);

// Reads and re-validates a bundle, including a fresh sha256 of model.glb.
BundleManifest read_bundle(const std::filesystem::path& dir);

nlohmann::json manifest_to_json(const BundleManifest& manifest);

}  // namespace xrauthor::bundle

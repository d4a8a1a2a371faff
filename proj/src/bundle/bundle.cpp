#include "xrauthor/bundle/bundle.hpp"

#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "xrauthor/common/sha256.hpp"
#include "xrauthor/common/text.hpp"

namespace xrauthor::bundle {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_atomically(const fs::path& target, std::string_view data) {
  const fs::path temp = target.parent_path() / ("." + target.filename().string() + ".tmp");
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw BundleError("IoError", "cannot write " + temp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw BundleError("IoError", "short write to " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw BundleError("IoError", "cannot move " + temp.string() + " into place");
  }
}

std::string read_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw BundleError("MissingFile", path.filename().string() + " is missing");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError("IoError", "cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<std::string> manifest_problems(const BundleManifest& m) {
  std::vector<std::string> out;
  if (m.verdicts.empty() || !m.verdicts.back().approved) out.push_back("last verdict must be approved");
  for (size_t i = 0; i < m.verdicts.size(); ++i) {
    for (auto& p : xrauthor::problems(m.verdicts[i])) out.push_back("verdicts[" + std::to_string(i) + "]." + p);
  }
  for (auto& p : xrauthor::problems(m.spec)) out.push_back("spec." + p);
  for (auto& p : xrauthor::problems(m.tutor_pack)) out.push_back("tutor_pack." + p);
  for (auto& p : xrauthor::problems(m.asset)) out.push_back("asset." + p);
  if (m.asset_file.empty() || m.asset_file.find('/') != std::string::npos || m.asset_file.find("..") != std::string::npos) {
    out.push_back("asset file name must be a plain file name");
  }
  return out;
}

}  // namespace

json manifest_to_json(const BundleManifest& m) {
  json asset = m.asset;
  asset["file"] = m.asset_file;
  return json{{"schema_version", m.schema_version},
              {"bundle_id", m.bundle_id},
              {"created_at", format_timestamp(m.created_at)},
              {"request", m.request},
              {"spec", m.spec},
              {"verdicts", m.verdicts},
              {"asset", asset},
              {"tutor_file", kTutorFile}};
}

std::vector<std::string> problems(const BundleInputs& in) {
  std::vector<std::string> out;
  if (in.bundle_id.empty()) out.push_back("bundle_id is empty");
  if (!in.request) out.push_back("request is missing");
  if (!in.spec) out.push_back("spec is missing");
  if (!in.tutor_pack) out.push_back("tutor_pack is missing");
  if (!in.asset) out.push_back("asset is missing");
  if (in.verdicts.empty() || !in.verdicts.back().approved) out.push_back("last verdict must be approved");
  if (in.asset) {
    if (in.asset->byte_length != in.asset_bytes.size()) out.push_back("asset byte_length does not match the bytes");
    if (in.asset->sha256 != sha256_hex(in.asset_bytes)) out.push_back("asset sha256 does not match the bytes");
  }
  return out;
}

BundleManifest write_bundle(const fs::path& dir, const BundleInputs& inputs) {
  if (auto p = problems(inputs); !p.empty()) throw BundleError("InvariantViolation", text::join(p, "; "));

  BundleManifest manifest;
  manifest.bundle_id = inputs.bundle_id;
  manifest.request = *inputs.request;
  manifest.spec = *inputs.spec;
  manifest.verdicts = inputs.verdicts;
  manifest.tutor_pack = *inputs.tutor_pack;
  manifest.asset = *inputs.asset;
  manifest.created_at = inputs.created_at;
  if (auto p = manifest_problems(manifest); !p.empty()) {
    throw BundleError("InvariantViolation", text::join(p, "; "));
  }

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw BundleError("IoError", "cannot create bundle directory " + dir.string());

  const std::string_view glb(reinterpret_cast<const char*>(inputs.asset_bytes.data()), inputs.asset_bytes.size());
  write_atomically(dir / kModelFile, glb);
  write_atomically(dir / kTutorFile, json(manifest.tutor_pack).dump(2) + "\n");
  write_atomically(dir / kManifestFile, manifest_to_json(manifest).dump(2) + "\n");
  return manifest;
}

BundleManifest read_bundle(const fs::path& dir) {
  const auto manifest_text = read_file(dir / kManifestFile);
  json doc;
  try {
    doc = json::parse(manifest_text);
  } catch (const json::exception& e) {
    throw BundleError("InvariantViolation", std::string("manifest.json does not parse: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    throw BundleError("InvariantViolation", "manifest.json lacks schema_version");
  }
  if (doc["schema_version"].get<int>() != kSchemaVersion) {
    throw BundleError("SchemaVersionUnknown",
                      "schema_version " + std::to_string(doc["schema_version"].get<int>()) + " is not supported");
  }

  BundleManifest m;
  std::string tutor_file;
  try {
    m.schema_version = kSchemaVersion;
    doc.at("bundle_id").get_to(m.bundle_id);
    m.created_at = parse_timestamp(doc.at("created_at").get<std::string>());
    doc.at("request").get_to(m.request);
    doc.at("spec").get_to(m.spec);
    doc.at("verdicts").get_to(m.verdicts);
    doc.at("asset").get_to(m.asset);
    doc.at("asset").at("file").get_to(m.asset_file);
    doc.at("tutor_file").get_to(tutor_file);
  } catch (const std::exception& e) {
    throw BundleError("InvariantViolation", std::string("manifest.json is malformed: ") + e.what());
  }
  if (tutor_file != kTutorFile) throw BundleError("InvariantViolation", "unexpected tutor file " + tutor_file);

  const auto tutor_text = read_file(dir / tutor_file);
  try {
    m.tutor_pack = json::parse(tutor_text).get<TutorPack>();
  } catch (const std::exception& e) {
    throw BundleError("InvariantViolation", std::string("tutor.json is malformed: ") + e.what());
  }

  if (auto p = manifest_problems(m); !p.empty()) throw BundleError("InvariantViolation", text::join(p, "; "));

  const auto model = read_file(dir / m.asset_file);
  const auto digest = sha256_hex(model);
  if (digest != m.asset.sha256) {
    throw BundleError("DigestMismatch", m.asset_file + " sha256 " + digest + " does not match manifest " + m.asset.sha256);
  }
  if (model.size() != m.asset.byte_length) {
    throw BundleError("InvariantViolation", m.asset_file + " size does not match the manifest");
  }
  return m;
}

}  // namespace xrauthor::bundle

#include <fstream>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/providers/mock.hpp"

namespace xrauthor::providers {

namespace fs = std::filesystem;

FixtureDir::FixtureDir(fs::path root) : root_(std::move(root)) {
  if (!fs::is_directory(root_)) throw InvalidArgument("mock fixture directory not found: " + root_.string());
  const auto config_path = root_ / "fixture.json";
  if (fs::exists(config_path)) {
    std::ifstream in(config_path);
    try {
      config_ = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("bad fixture.json in " + root_.string() + ": " + e.what());
    }
    if (auto it = config_->find("base"); it != config_->end()) {
      base_ = std::make_shared<const FixtureDir>(fs::weakly_canonical(root_ / it->get<std::string>()));
    }
  }
}

std::optional<fs::path> FixtureDir::find(const fs::path& relative) const {
  const auto candidate = root_ / relative;
  if (fs::is_regular_file(candidate)) return candidate;
  if (base_) return base_->find(relative);
  return std::nullopt;
}

std::optional<nlohmann::json> FixtureDir::load_json(const fs::path& relative) const {
  auto path = find(relative);
  if (!path) return std::nullopt;
  std::ifstream in(*path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError("malformed mock fixture " + path->string() + ": " + e.what());
  }
}

std::optional<nlohmann::json> FixtureDir::setting(const std::string& key) const {
  if (config_) {
    if (auto it = config_->find(key); it != config_->end()) return std::optional<nlohmann::json>(std::in_place, *it);
  }
  if (base_) return base_->setting(key);
  return std::nullopt;
}

}  // namespace xrauthor::providers

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xrauthor/providers/chat.hpp"
#include "xrauthor/providers/generation.hpp"
#include "xrauthor/providers/search.hpp"

namespace xrauthor::providers {

// A directory of mock fixtures:
//
//   fixture.json                  optional {"base": "<dir>", "chat_supports_images": bool}
//   chat/<key>.json               {"reply": "..."}, {"reply_json": {...}} or
//                                 {"replies": [...]} served in order, the last repeating
//   generation/<key>.json         {"statuses": [...], "model": "assets/x.glb", "preview_image": "..."}
//   search/<normalized-query>.json {"results": [...]}
//   assets/...
//
// Lookups fall through to the base directory when a file is absent.
class FixtureDir {
 public:
  explicit FixtureDir(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  std::optional<std::filesystem::path> find(const std::filesystem::path& relative) const;
  std::optional<nlohmann::json> load_json(const std::filesystem::path& relative) const;
  // Setting from the nearest fixture.json that defines `key`.
  std::optional<nlohmann::json> setting(const std::string& key) const;

 private:
  std::filesystem::path root_;
  std::optional<nlohmann::json> config_;
  std::shared_ptr<const FixtureDir> base_;
};

// Replies keyed first by the exact request hash (fixture_key), then by the
// sha256 of the system prompt alone, which acts as a per-agent default.
class MockChatProvider final : public ChatProvider {
 public:
  explicit MockChatProvider(FixtureDir fixtures);

  bool supports_images() const override { return supports_images_; }
  std::string name() const override { return "mock-chat"; }

 protected:
  ChatReply do_chat(const ChatRequest& request) override;

 private:
  FixtureDir fixtures_;
  bool supports_images_ = true;
  std::mutex mu_;
  std::map<std::string, size_t> served_;  // per fixture file, for "replies"
};

// Plays a scripted status sequence, one entry per get_task call; the last
// entry repeats. Scripts are keyed by sha256(prompt), falling back to
// generation/default.json.
class MockGenerationProvider final : public GenerationProvider {
 public:
  explicit MockGenerationProvider(FixtureDir fixtures);

  std::string name() const override { return "mock-generation"; }

 protected:
  std::string do_start(const std::string& prompt) override;
  GenerationTask do_get(const std::string& task_id) override;
  std::vector<std::uint8_t> do_fetch(const std::string& model_url) override;

 private:
  struct Script {
    std::vector<nlohmann::json> statuses;
    std::string model;
    std::string preview_image;
    size_t next = 0;
  };

  FixtureDir fixtures_;
  std::mutex mu_;
  std::map<std::string, Script> tasks_;
  std::uint64_t started_ = 0;
};

// Search fixtures keyed by the slugified query; unknown queries return no results.
class MockSearchProvider final : public SearchProvider {
 public:
  explicit MockSearchProvider(FixtureDir fixtures);

  std::string name() const override { return "mock-search"; }

 protected:
  std::vector<SearchResult> do_search(const std::string& query, int k) override;

 private:
  FixtureDir fixtures_;
};

std::string mock_search_key(const std::string& query);

}  // namespace xrauthor::providers

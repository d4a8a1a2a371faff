#pragma once

#include <memory>
#include <string>

#include "xrauthor/providers/chat.hpp"
#include "xrauthor/providers/generation.hpp"
#include "xrauthor/providers/http_transport.hpp"
#include "xrauthor/providers/retry.hpp"
#include "xrauthor/providers/search.hpp"

namespace xrauthor::providers {

struct LiveOptions {
  std::chrono::seconds timeout{120};
  int max_in_flight = 4;
  RetryPolicy retry;
  Sleeper sleeper = real_sleeper();
};

// OpenAI-compatible /chat/completions.
class OpenAiChatProvider final : public ChatProvider {
 public:
  OpenAiChatProvider(std::string api_key, std::string base_url, std::string model, LiveOptions options = {});

  bool supports_images() const override { return true; }
  std::string name() const override { return "openai"; }

 protected:
  ChatReply do_chat(const ChatRequest& request) override;

 private:
  std::string api_key_;
  std::string model_;
  LiveOptions options_;
  HttpTransport http_;
};

// Anthropic /v1/messages.
class AnthropicChatProvider final : public ChatProvider {
 public:
  AnthropicChatProvider(std::string api_key, std::string base_url, std::string model, LiveOptions options = {});

  bool supports_images() const override { return true; }
  std::string name() const override { return "anthropic"; }

 protected:
  ChatReply do_chat(const ChatRequest& request) override;

 private:
  std::string api_key_;
  std::string model_;
  LiveOptions options_;
  HttpTransport http_;
};

// Meshy text-to-3D task API (preview mode).
class MeshyGenerationProvider final : public GenerationProvider {
 public:
  MeshyGenerationProvider(std::string api_key, std::string base_url, LiveOptions options = {});

  std::string name() const override { return "meshy"; }

  // Meshy rejects longer prompts.
  static constexpr size_t kMaxPromptBytes = 600;

 protected:
  std::string do_start(const std::string& prompt) override;
  GenerationTask do_get(const std::string& task_id) override;
  std::vector<std::uint8_t> do_fetch(const std::string& model_url) override;

 private:
  std::string api_key_;
  LiveOptions options_;
  HttpTransport http_;
};

// Tavily /search.
class TavilySearchProvider final : public SearchProvider {
 public:
  TavilySearchProvider(std::string api_key, std::string base_url, LiveOptions options = {});

  std::string name() const override { return "tavily"; }

 protected:
  std::vector<SearchResult> do_search(const std::string& query, int k) override;

 private:
  std::string api_key_;
  LiveOptions options_;
  HttpTransport http_;
};

// Truncates to at most `max_bytes` without splitting a UTF-8 sequence.
std::string truncate_utf8(const std::string& s, size_t max_bytes);

}  // namespace xrauthor::providers

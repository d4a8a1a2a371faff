#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xrauthor/providers/chat.hpp"
#include "xrauthor/providers/generation.hpp"
#include "xrauthor/providers/search.hpp"

namespace xrauthor::providers {

enum class ProviderMode { Live, Mock };

std::string to_string(ProviderMode mode);
std::optional<ProviderMode> parse_provider_mode(std::string_view s);

enum class ChatKind { OpenAi, Anthropic };

struct ProviderConfig {
  ProviderMode mode = ProviderMode::Mock;

  ChatKind chat_kind = ChatKind::OpenAi;
  std::string chat_api_key;
  std::string chat_api_base;
  std::string chat_model;

  std::string meshy_api_key;
  std::string meshy_api_base = "https://api.meshy.ai";

  std::string tavily_api_key;
  std::string tavily_api_base = "https://api.tavily.com";

  std::filesystem::path mock_fixture_dir;

  // Credential values, for scrubbing logs and responses.
  std::vector<std::string> secrets() const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_environment();

// Reads CHAT_API_KEY, CHAT_API_BASE, CHAT_MODEL, CHAT_PROVIDER, MESHY_API_KEY,
// MESHY_API_BASE, TAVILY_API_KEY, TAVILY_API_BASE, PROVIDER_MODE and
// MOCK_FIXTURE_DIR. A JSON config file may supply the same keys except the
// credentials; the environment wins. Without PROVIDER_MODE the mode is live
// only when all three credentials are present.
ProviderConfig load_provider_config(const EnvLookup& env,
                                    const std::optional<std::filesystem::path>& config_file = std::nullopt);

std::filesystem::path default_fixture_dir();

struct ProviderSet {
  std::shared_ptr<ChatProvider> chat;
  std::shared_ptr<GenerationProvider> generation;
  std::shared_ptr<SearchProvider> search;
};

// Throws AuthError in live mode when a credential is missing.
ProviderSet make_providers(const ProviderConfig& config);

}  // namespace xrauthor::providers

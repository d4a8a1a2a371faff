#include "xrauthor/providers/config.hpp"

#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/common/text.hpp"
#include "xrauthor/providers/live.hpp"
#include "xrauthor/providers/mock.hpp"

namespace xrauthor::providers {

std::string to_string(ProviderMode mode) { return mode == ProviderMode::Live ? "live" : "mock"; }

std::optional<ProviderMode> parse_provider_mode(std::string_view s) {
  if (s == "live") return ProviderMode::Live;
  if (s == "mock") return ProviderMode::Mock;
  return std::nullopt;
}

std::vector<std::string> ProviderConfig::secrets() const {
  std::vector<std::string> out;
  for (const auto* s : {&chat_api_key, &meshy_api_key, &tavily_api_key}) {
    if (!s->empty()) out.push_back(*s);
  }
  return out;
}

EnvLookup process_environment() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
}

std::filesystem::path default_fixture_dir() { return XRAUTHOR_DEFAULT_FIXTURE_DIR; }

ProviderConfig load_provider_config(const EnvLookup& env, const std::optional<std::filesystem::path>& config_file) {
  nlohmann::json file = nlohmann::json::object();
  if (config_file) {
    std::ifstream in(*config_file);
    if (!in) throw InvalidArgument("cannot read config file " + config_file->string());
    try {
      file = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("bad config file " + config_file->string() + ": " + e.what());
    }
  }
  auto get = [&](const std::string& key, bool secret = false) -> std::optional<std::string> {
    if (auto v = env(key)) return v;
    if (!secret && file.contains(key) && file[key].is_string()) return file[key].get<std::string>();
    return std::nullopt;
  };

  ProviderConfig config;
  config.chat_api_key = get("CHAT_API_KEY", true).value_or("");
  config.meshy_api_key = get("MESHY_API_KEY", true).value_or("");
  config.tavily_api_key = get("TAVILY_API_KEY", true).value_or("");
  config.chat_model = get("CHAT_MODEL").value_or("");
  if (auto v = get("MESHY_API_BASE")) config.meshy_api_base = *v;
  if (auto v = get("TAVILY_API_BASE")) config.tavily_api_base = *v;

  if (auto kind = get("CHAT_PROVIDER")) {
    if (*kind == "anthropic") {
      config.chat_kind = ChatKind::Anthropic;
    } else if (*kind == "openai") {
      config.chat_kind = ChatKind::OpenAi;
    } else {
      throw InvalidArgument("CHAT_PROVIDER must be openai or anthropic");
    }
  } else if (text::contains_folded(config.chat_model, "claude") ||
             text::contains_folded(get("CHAT_API_BASE").value_or(""), "anthropic")) {
    config.chat_kind = ChatKind::Anthropic;
  }
  const bool anthropic = config.chat_kind == ChatKind::Anthropic;
  config.chat_api_base =
      get("CHAT_API_BASE").value_or(anthropic ? "https://api.anthropic.com" : "https://api.openai.com/v1");
  if (config.chat_model.empty()) config.chat_model = anthropic ? "claude-sonnet-4-5" : "gpt-4o";

  if (auto mode = get("PROVIDER_MODE")) {
    auto parsed = parse_provider_mode(*mode);
    if (!parsed) throw InvalidArgument("PROVIDER_MODE must be live or mock");
    config.mode = *parsed;
  } else {
    const bool all_keys =
        !config.chat_api_key.empty() && !config.meshy_api_key.empty() && !config.tavily_api_key.empty();
    config.mode = all_keys ? ProviderMode::Live : ProviderMode::Mock;
  }
  config.mock_fixture_dir = get("MOCK_FIXTURE_DIR").value_or(default_fixture_dir().string());
  return config;
}

ProviderSet make_providers(const ProviderConfig& config) {
  ProviderSet set;
  if (config.mode == ProviderMode::Mock) {
    FixtureDir fixtures(config.mock_fixture_dir);
    set.chat = std::make_shared<MockChatProvider>(fixtures);
    set.generation = std::make_shared<MockGenerationProvider>(fixtures);
    set.search = std::make_shared<MockSearchProvider>(fixtures);
    return set;
  }
  if (config.chat_api_key.empty()) throw AuthError("live mode requires CHAT_API_KEY");
  if (config.meshy_api_key.empty()) throw AuthError("live mode requires MESHY_API_KEY");
  if (config.tavily_api_key.empty()) throw AuthError("live mode requires TAVILY_API_KEY");
  if (config.chat_kind == ChatKind::Anthropic) {
    set.chat = std::make_shared<AnthropicChatProvider>(config.chat_api_key, config.chat_api_base, config.chat_model);
  } else {
    set.chat = std::make_shared<OpenAiChatProvider>(config.chat_api_key, config.chat_api_base, config.chat_model);
  }
  set.generation = std::make_shared<MeshyGenerationProvider>(config.meshy_api_key, config.meshy_api_base);
  set.search = std::make_shared<TavilySearchProvider>(config.tavily_api_key, config.tavily_api_base);
  return set;
}

}  // namespace xrauthor::providers

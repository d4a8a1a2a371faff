#include <nlohmann/json.hpp>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/providers/live.hpp"

namespace xrauthor::providers {

using nlohmann::json;

namespace {

json parse_body(const HttpResponse& response, const std::string& context) {
  try {
    return json::parse(response.body);
  } catch (const json::exception&) {
    throw ProviderError(context + ": response is not JSON");
  }
}

}  // namespace

OpenAiChatProvider::OpenAiChatProvider(std::string api_key, std::string base_url, std::string model,
                                       LiveOptions options)
    : api_key_(std::move(api_key)),
      model_(std::move(model)),
      options_(std::move(options)),
      http_(std::move(base_url), options_.timeout, options_.max_in_flight) {}

ChatReply OpenAiChatProvider::do_chat(const ChatRequest& request) {
  json messages = json::array();
  messages.push_back({{"role", "system"}, {"content", wire_system_text(request)}});
  for (const auto& m : request.messages) {
    const char* role = m.role == Role::User ? "user" : "assistant";
    if (m.image_ref) {
      messages.push_back({{"role", role},
                          {"content", json::array({{{"type", "text"}, {"text", m.text}},
                                                   {{"type", "image_url"}, {"image_url", {{"url", *m.image_ref}}}}})}});
    } else {
      messages.push_back({{"role", role}, {"content", m.text}});
    }
  }
  const json body{{"model", model_},
                  {"messages", messages},
                  {"max_tokens", request.params.max_tokens},
                  {"temperature", request.params.temperature}};
  const HttpHeaders headers{{"Authorization", "Bearer " + api_key_}};

  const auto response = with_retries(options_.retry, options_.sleeper, [&] {
    auto r = http_.post_json("/chat/completions", body.dump(), headers);
    if (r.status < 200 || r.status >= 300) throw_for_status(r, "chat completion");
    return r;
  });

  const auto j = parse_body(response, "chat completion");
  ChatReply reply;
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    reply.text = content.is_null() ? std::string{} : content.get<std::string>();
    if (auto it = j.find("usage"); it != j.end() && it->is_object()) {
      reply.usage.input_tokens = it->value("prompt_tokens", 0);
      reply.usage.output_tokens = it->value("completion_tokens", 0);
    }
  } catch (const json::exception& e) {
    throw ProviderError(std::string("chat completion: unexpected response shape: ") + e.what());
  }
  return reply;
}

AnthropicChatProvider::AnthropicChatProvider(std::string api_key, std::string base_url, std::string model,
                                             LiveOptions options)
    : api_key_(std::move(api_key)),
      model_(std::move(model)),
      options_(std::move(options)),
      http_(std::move(base_url), options_.timeout, options_.max_in_flight) {}

ChatReply AnthropicChatProvider::do_chat(const ChatRequest& request) {
  json system = json::array({{{"type", "text"}, {"text", request.system}}});
  if (!request.output_contract.empty()) system.push_back({{"type", "text"}, {"text", request.output_contract}});

  json messages = json::array();
  for (const auto& m : request.messages) {
    json content = json::array({{{"type", "text"}, {"text", m.text}}});
    if (m.image_ref) {
      content.push_back({{"type", "image"}, {"source", {{"type", "url"}, {"url", *m.image_ref}}}});
    }
    messages.push_back({{"role", m.role == Role::User ? "user" : "assistant"}, {"content", content}});
  }
  const json body{{"model", model_},
                  {"system", system},
                  {"messages", messages},
                  {"max_tokens", request.params.max_tokens},
                  {"temperature", request.params.temperature}};
  const HttpHeaders headers{{"x-api-key", api_key_}, {"anthropic-version", "2023-06-01"}};

  const auto response = with_retries(options_.retry, options_.sleeper, [&] {
    auto r = http_.post_json("/v1/messages", body.dump(), headers);
    if (r.status == 529) throw ServerError("messages: provider overloaded");
    if (r.status < 200 || r.status >= 300) throw_for_status(r, "messages");
    return r;
  });

  const auto j = parse_body(response, "messages");
  ChatReply reply;
  try {
    for (const auto& block : j.at("content")) {
      if (block.value("type", std::string{}) == "text") reply.text += block.at("text").get<std::string>();
    }
    if (auto it = j.find("usage"); it != j.end() && it->is_object()) {
      reply.usage.input_tokens = it->value("input_tokens", 0);
      reply.usage.output_tokens = it->value("output_tokens", 0);
    }
  } catch (const json::exception& e) {
    throw ProviderError(std::string("messages: unexpected response shape: ") + e.what());
  }
  return reply;
}

}  // namespace xrauthor::providers

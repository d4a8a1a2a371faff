#include <algorithm>

#include <nlohmann/json.hpp>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/common/sha256.hpp"
#include "xrauthor/common/text.hpp"
#include "xrauthor/providers/chat.hpp"
#include "xrauthor/providers/generation.hpp"
#include "xrauthor/providers/search.hpp"

namespace xrauthor::providers {

void validate(const ChatRequest& request) {
  if (request.messages.empty()) throw InvalidArgument("chat request has no messages");
  for (size_t i = 0; i < request.messages.size(); ++i) {
    const Role expected = i % 2 == 0 ? Role::User : Role::Assistant;
    if (request.messages[i].role != expected) {
      throw InvalidArgument("chat messages must alternate user/assistant starting with user (message " +
                            std::to_string(i) + ")");
    }
  }
  if (request.params.max_tokens < 1) throw InvalidArgument("max_tokens must be positive");
}

std::string wire_system_text(const ChatRequest& request) {
  if (request.output_contract.empty()) return request.system;
  return request.system + "\n\n" + request.output_contract;
}

std::string fixture_key(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    nlohmann::json entry{{"role", m.role == Role::User ? "user" : "assistant"}, {"text", m.text}};
    if (m.image_ref) entry["image_ref"] = *m.image_ref;
    messages.push_back(std::move(entry));
  }
  const nlohmann::json canonical{
      {"system", request.system}, {"output_contract", request.output_contract}, {"messages", messages}};
  return sha256_hex(canonical.dump());
}

ChatReply ChatProvider::chat(const ChatRequest& request) {
  validate(request);
  return do_chat(request);
}

std::string to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::Pending: return "Pending";
    case TaskStatus::InProgress: return "InProgress";
    case TaskStatus::Succeeded: return "Succeeded";
    case TaskStatus::Failed: return "Failed";
  }
  return "?";
}

std::vector<std::string> problems(const GenerationTask& task) {
  std::vector<std::string> out;
  if (task.model_url.has_value() != (task.status == TaskStatus::Succeeded)) {
    out.push_back("model_url must be present exactly when the task succeeded");
  }
  if (task.progress < 0 || task.progress > 100) out.push_back("progress must lie in 0..100");
  return out;
}

std::string GenerationProvider::start_generation(const std::string& prompt) {
  if (text::trim(prompt).empty()) throw InvalidArgument("generation prompt must not be empty");
  return do_start(prompt);
}

GenerationTask GenerationProvider::get_task(const std::string& task_id) {
  auto task = do_get(task_id);
  if (auto p = problems(task); !p.empty()) {
    throw ProviderError("inconsistent generation task " + task_id + ": " + text::join(p, "; "));
  }
  return task;
}

std::vector<std::uint8_t> GenerationProvider::fetch_asset(const std::string& model_url) {
  if (model_url.empty()) throw InvalidArgument("model url must not be empty");
  return do_fetch(model_url);
}

std::vector<SearchResult> SearchProvider::search(const std::string& query, int k) {
  if (text::trim(query).empty()) throw InvalidArgument("search query must not be empty");
  if (k < 1) throw InvalidArgument("k must be at least 1");
  auto results = do_search(query, k);
  std::erase_if(results, [](const SearchResult& r) { return !text::is_well_formed_url(r.url); });
  for (auto& r : results) r.score = std::clamp(r.score, 0.0, 1.0);
  std::stable_sort(results.begin(), results.end(),
                   [](const SearchResult& a, const SearchResult& b) { return a.score > b.score; });
  if (results.size() > static_cast<size_t>(k)) results.resize(static_cast<size_t>(k));
  return results;
}

}  // namespace xrauthor::providers

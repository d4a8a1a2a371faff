#include <algorithm>
#include <fstream>
#include <iterator>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/common/sha256.hpp"
#include "xrauthor/common/text.hpp"
#include "xrauthor/providers/mock.hpp"

namespace xrauthor::providers {

namespace {

constexpr std::string_view kMockScheme = "mock://";

TaskStatus parse_status(const std::string& s) {
  if (s == "PENDING") return TaskStatus::Pending;
  if (s == "IN_PROGRESS") return TaskStatus::InProgress;
  if (s == "SUCCEEDED") return TaskStatus::Succeeded;
  if (s == "FAILED") return TaskStatus::Failed;
  throw ProviderError("unknown status in mock generation script: " + s);
}

}  // namespace

MockChatProvider::MockChatProvider(FixtureDir fixtures) : fixtures_(std::move(fixtures)) {
  if (auto flag = fixtures_.setting("chat_supports_images")) supports_images_ = flag->get<bool>();
}

ChatReply MockChatProvider::do_chat(const ChatRequest& request) {
  const auto key = fixture_key(request);
  std::string file = "chat/" + key + ".json";
  auto fixture = fixtures_.load_json(file);
  if (!fixture) {
    file = "chat/" + sha256_hex(request.system) + ".json";
    fixture = fixtures_.load_json(file);
  }
  if (!fixture) throw ProviderError("no mock chat fixture for key " + key);
  if (auto seq = fixture->find("replies"); seq != fixture->end()) {
    if (!seq->is_array() || seq->empty()) throw ProviderError("mock chat fixture " + file + " has empty replies");
    std::lock_guard lock(mu_);
    auto& n = served_[file];
    const auto entry = (*seq)[std::min(n, seq->size() - 1)];
    ++n;
    fixture = entry;
  }

  ChatReply reply;
  if (auto it = fixture->find("reply"); it != fixture->end()) {
    reply.text = it->get<std::string>();
  } else if (auto jt = fixture->find("reply_json"); jt != fixture->end()) {
    reply.text = jt->dump(2);
  } else {
    throw ProviderError("mock chat fixture for key " + key + " has neither reply nor reply_json");
  }
  reply.usage.input_tokens = static_cast<int>(wire_system_text(request).size() / 4);
  reply.usage.output_tokens = static_cast<int>(reply.text.size() / 4);
  return reply;
}

MockGenerationProvider::MockGenerationProvider(FixtureDir fixtures) : fixtures_(std::move(fixtures)) {}

std::string MockGenerationProvider::do_start(const std::string& prompt) {
  auto script_json = fixtures_.load_json("generation/" + sha256_hex(prompt) + ".json");
  if (!script_json) script_json = fixtures_.load_json("generation/default.json");
  if (!script_json) throw ProviderError("no mock generation script");

  Script script;
  for (const auto& s : script_json->at("statuses")) script.statuses.push_back(s);
  if (script.statuses.empty()) throw ProviderError("mock generation script has no statuses");
  script.model = script_json->value("model", std::string{});
  script.preview_image = script_json->value("preview_image", std::string{});

  std::lock_guard lock(mu_);
  const auto task_id = "mock-" + sha256_hex(prompt + "#" + std::to_string(started_++)).substr(0, 24);
  tasks_[task_id] = std::move(script);
  return task_id;
}

GenerationTask MockGenerationProvider::do_get(const std::string& task_id) {
  std::lock_guard lock(mu_);
  auto it = tasks_.find(task_id);
  if (it == tasks_.end()) throw UnknownTask("unknown generation task: " + task_id);
  auto& script = it->second;
  const auto& entry = script.statuses[std::min(script.next, script.statuses.size() - 1)];
  if (script.next < script.statuses.size()) ++script.next;

  GenerationTask task;
  task.task_id = task_id;
  task.status = parse_status(entry.at("status").get<std::string>());
  task.progress = entry.value("progress", task.status == TaskStatus::Succeeded ? 100 : 0);
  if (task.status == TaskStatus::Failed) task.failure_reason = entry.value("reason", std::string{"failed"});
  if (task.status == TaskStatus::Succeeded) task.model_url = std::string(kMockScheme) + script.model;
  if (!script.preview_image.empty() && task.status == TaskStatus::Succeeded) {
    task.preview_image_url = std::string(kMockScheme) + script.preview_image;
  }
  return task;
}

std::vector<std::uint8_t> MockGenerationProvider::do_fetch(const std::string& model_url) {
  if (!model_url.starts_with(kMockScheme)) throw NotFound("mock provider cannot fetch " + model_url);
  const auto relative = model_url.substr(kMockScheme.size());
  if (relative.find("..") != std::string::npos) throw NotFound("mock asset not found: " + model_url);
  auto path = fixtures_.find(relative);
  if (!path) throw NotFound("mock asset not found: " + model_url);
  std::ifstream in(*path, std::ios::binary);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string mock_search_key(const std::string& query) { return text::slugify(query); }

MockSearchProvider::MockSearchProvider(FixtureDir fixtures) : fixtures_(std::move(fixtures)) {}

std::vector<SearchResult> MockSearchProvider::do_search(const std::string& query, int /*k*/) {
  auto fixture = fixtures_.load_json("search/" + mock_search_key(query) + ".json");
  if (!fixture) return {};
  std::vector<SearchResult> out;
  for (const auto& r : fixture->at("results")) {
    out.push_back(SearchResult{r.at("title").get<std::string>(), r.at("url").get<std::string>(),
                               r.value("snippet", std::string{}), r.value("score", 0.0)});
  }
  return out;
}

}  // namespace xrauthor::providers

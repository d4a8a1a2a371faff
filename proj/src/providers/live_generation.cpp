#include <nlohmann/json.hpp>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/providers/live.hpp"

namespace xrauthor::providers {

using nlohmann::json;

std::string truncate_utf8(const std::string& s, size_t max_bytes) {
  if (s.size() <= max_bytes) return s;
  size_t cut = max_bytes;
  // Back up over continuation bytes so a multi-byte sequence is never split.
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  return s.substr(0, cut);
}

MeshyGenerationProvider::MeshyGenerationProvider(std::string api_key, std::string base_url, LiveOptions options)
    : api_key_(std::move(api_key)),
      options_(std::move(options)),
      http_(std::move(base_url), options_.timeout, options_.max_in_flight) {}

std::string MeshyGenerationProvider::do_start(const std::string& prompt) {
  const json body{{"mode", "preview"}, {"prompt", truncate_utf8(prompt, kMaxPromptBytes)}, {"art_style", "realistic"}};
  const HttpHeaders headers{{"Authorization", "Bearer " + api_key_}};
  const auto response = with_retries(options_.retry, options_.sleeper, [&] {
    auto r = http_.post_json("/openapi/v2/text-to-3d", body.dump(), headers);
    if (r.status < 200 || r.status >= 300) throw_for_status(r, "text-to-3d create");
    return r;
  });
  try {
    return json::parse(response.body).at("result").get<std::string>();
  } catch (const json::exception&) {
    throw ProviderError("text-to-3d create: response lacks a task id");
  }
}

GenerationTask MeshyGenerationProvider::do_get(const std::string& task_id) {
  const HttpHeaders headers{{"Authorization", "Bearer " + api_key_}};
  const auto response = with_retries(options_.retry, options_.sleeper, [&] {
    auto r = http_.get("/openapi/v2/text-to-3d/" + task_id, headers);
    if (r.status == 404) throw UnknownTask("unknown generation task: " + task_id);
    if (r.status < 200 || r.status >= 300) throw_for_status(r, "text-to-3d status");
    return r;
  });

  GenerationTask task;
  task.task_id = task_id;
  try {
    const auto j = json::parse(response.body);
    const auto status = j.at("status").get<std::string>();
    task.progress = j.value("progress", 0);
    if (status == "PENDING") {
      task.status = TaskStatus::Pending;
    } else if (status == "IN_PROGRESS") {
      task.status = TaskStatus::InProgress;
    } else if (status == "SUCCEEDED") {
      task.status = TaskStatus::Succeeded;
      task.model_url = j.at("model_urls").at("glb").get<std::string>();
    } else if (status == "FAILED" || status == "CANCELED" || status == "EXPIRED") {
      task.status = TaskStatus::Failed;
      task.failure_reason = status;
      if (auto it = j.find("task_error"); it != j.end() && it->is_object()) {
        const auto message = it->value("message", std::string{});
        if (!message.empty()) task.failure_reason = message;
      }
    } else {
      throw ProviderError("text-to-3d status: unknown status " + status);
    }
    if (auto it = j.find("thumbnail_url"); it != j.end() && it->is_string() && !it->get<std::string>().empty()) {
      task.preview_image_url = it->get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ProviderError(std::string("text-to-3d status: unexpected response shape: ") + e.what());
  }
  return task;
}

std::vector<std::uint8_t> MeshyGenerationProvider::do_fetch(const std::string& model_url) {
  const auto response = with_retries(options_.retry, options_.sleeper, [&] {
    auto r = http_.get_url(model_url);
    if (r.status == 404 || r.status == 410) throw NotFound("asset not found");
    if (r.status < 200 || r.status >= 300) throw_for_status(r, "asset download");
    if (auto declared = r.header("Content-Length")) {
      unsigned long long expected = 0;
      try {
        expected = std::stoull(*declared);
      } catch (const std::exception&) {
        throw NetworkError("asset download: bad Content-Length " + *declared);
      }
      if (expected != r.body.size()) {
        throw NetworkError("asset download truncated: declared " + *declared + " bytes, received " +
                           std::to_string(r.body.size()));
      }
    }
    return r;
  });
  return std::vector<std::uint8_t>(response.body.begin(), response.body.end());
}

}  // namespace xrauthor::providers

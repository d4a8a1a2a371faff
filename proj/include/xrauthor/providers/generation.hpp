#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace xrauthor::providers {

enum class TaskStatus { Pending, InProgress, Succeeded, Failed };

std::string to_string(TaskStatus s);

struct GenerationTask {
  std::string task_id;
  TaskStatus status = TaskStatus::Pending;
  int progress = 0;             // 0..100, meaningful while InProgress
  std::string failure_reason;   // set when Failed
  std::optional<std::string> model_url;          // set iff Succeeded
  std::optional<std::string> preview_image_url;

  bool terminal() const { return status == TaskStatus::Succeeded || status == TaskStatus::Failed; }
};

std::vector<std::string> problems(const GenerationTask& task);

// Text-to-3D service modeled as create-then-poll.
class GenerationProvider {
 public:
  virtual ~GenerationProvider() = default;

  // Returns the new task id. Throws InvalidArgument on an empty prompt.
  std::string start_generation(const std::string& prompt);

  // One status read. Throws UnknownTask for ids the provider never issued.
  GenerationTask get_task(const std::string& task_id);

  // Raw GLB bytes behind a Succeeded task's model_url.
  std::vector<std::uint8_t> fetch_asset(const std::string& model_url);

  virtual std::string name() const = 0;

 protected:
  virtual std::string do_start(const std::string& prompt) = 0;
  virtual GenerationTask do_get(const std::string& task_id) = 0;
  virtual std::vector<std::uint8_t> do_fetch(const std::string& model_url) = 0;
};

}  // namespace xrauthor::providers

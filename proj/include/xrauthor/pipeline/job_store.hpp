#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stop_token>
#include <string>
#include <vector>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/pipeline/job.hpp"

namespace xrauthor::pipeline {

class JobNotFound : public Error {
 public:
  explicit JobNotFound(const std::string& job_id) : Error("JobNotFound", "no job with id " + job_id) {}
};

struct EventBatch {
  std::vector<JobEvent> events;  // events from the requested offset on
  bool terminal = false;         // the log already holds the terminal event
};

class JobStore {
 public:
  virtual ~JobStore() = default;

  // Persists a fresh job (version 0). Throws StorageError if the id is taken.
  virtual void create(PipelineJob& job) = 0;
  virtual PipelineJob load(const std::string& job_id) = 0;
  virtual bool exists(const std::string& job_id) = 0;
  // Compare-and-set on job.version; bumps it on success. Throws
  // ConcurrentModification when another writer got there first.
  virtual void save(PipelineJob& job) = 0;
  virtual std::vector<std::string> list_jobs() = 0;

  virtual void put_asset(const std::string& job_id, int attempt, std::span<const std::uint8_t> bytes) = 0;
  virtual std::vector<std::uint8_t> get_asset(const std::string& job_id, int attempt) = 0;
  virtual std::filesystem::path bundle_dir(const std::string& job_id) = 0;

  // Returns as soon as the log holds more than `offset` events, the job is
  // terminal, the timeout elapses or `stop` is requested.
  virtual EventBatch wait_for_events(const std::string& job_id, size_t offset, std::chrono::milliseconds timeout,
                                     std::stop_token stop = {}) = 0;
};

// Layout under root:
//   jobs/<id>/job.json          header with version, event_count, events_bytes
//   jobs/<id>/events.jsonl      one JobEvent per line, append-only
//   jobs/<id>/attempts/<k>/model.glb
//   jobs/<id>/bundle/
// Events are appended before the header is renamed into place, so a crash
// leaves at most a torn tail past events_bytes, which is ignored and
// overwritten by the next save.
class FileJobStore final : public JobStore {
 public:
  // Throws StorageError if the root cannot be created.
  explicit FileJobStore(std::filesystem::path root);

  void create(PipelineJob& job) override;
  PipelineJob load(const std::string& job_id) override;
  bool exists(const std::string& job_id) override;
  void save(PipelineJob& job) override;
  std::vector<std::string> list_jobs() override;

  void put_asset(const std::string& job_id, int attempt, std::span<const std::uint8_t> bytes) override;
  std::vector<std::uint8_t> get_asset(const std::string& job_id, int attempt) override;
  std::filesystem::path bundle_dir(const std::string& job_id) override;

  EventBatch wait_for_events(const std::string& job_id, size_t offset, std::chrono::milliseconds timeout,
                             std::stop_token stop = {}) override;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path job_dir(const std::string& job_id) const;
  std::mutex& job_mutex(const std::string& job_id);
  void commit(PipelineJob& job, bool creating);

  std::filesystem::path root_;
  std::mutex table_mu_;
  std::map<std::string, std::unique_ptr<std::mutex>> job_mutexes_;

  std::mutex notify_mu_;
  std::condition_variable_any notify_cv_;
  std::uint64_t changes_ = 0;
};

bool is_valid_job_id(std::string_view id);

}  // namespace xrauthor::pipeline

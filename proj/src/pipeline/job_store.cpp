#include "xrauthor/pipeline/job_store.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>

namespace xrauthor::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kHeaderFile = "job.json";
constexpr const char* kEventsFile = "events.jsonl";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_atomically(const fs::path& path, std::string_view data) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw StorageError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw StorageError("cannot rename " + tmp.string() + ": " + ec.message());
}

struct Header {
  json body;
  std::uint64_t version = 0;
  size_t event_count = 0;
  std::uint64_t events_bytes = 0;
};

Header read_header(const fs::path& dir) {
  Header h;
  try {
    h.body = json::parse(read_file(dir / kHeaderFile));
    h.version = h.body.at("version").get<std::uint64_t>();
    h.event_count = h.body.at("event_count").get<size_t>();
    h.events_bytes = h.body.at("events_bytes").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw StorageError("corrupt job header in " + dir.string() + ": " + e.what());
  }
  return h;
}

std::vector<JobEvent> read_events(const fs::path& dir, const Header& h) {
  std::vector<JobEvent> events;
  if (h.event_count == 0) return events;
  std::string data = read_file(dir / kEventsFile);
  if (data.size() < h.events_bytes) throw StorageError("event log shorter than committed in " + dir.string());
  data.resize(h.events_bytes);
  std::istringstream lines(data);
  std::string line;
  try {
    while (events.size() < h.event_count && std::getline(lines, line)) {
      events.push_back(json::parse(line).get<JobEvent>());
    }
  } catch (const std::exception& e) {
    throw StorageError("corrupt event log in " + dir.string() + ": " + e.what());
  }
  if (events.size() != h.event_count) throw StorageError("event log missing committed events in " + dir.string());
  return events;
}

}  // namespace

bool is_valid_job_id(std::string_view id) {
  static const std::regex pattern("[A-Za-z0-9_-]{1,64}");
  return std::regex_match(id.begin(), id.end(), pattern);
}

FileJobStore::FileJobStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "jobs", ec);
  if (ec || !fs::is_directory(root_ / "jobs")) {
    throw StorageError("cannot create job store at " + root_.string() + (ec ? ": " + ec.message() : ""));
  }
}

fs::path FileJobStore::job_dir(const std::string& job_id) const {
  if (!is_valid_job_id(job_id)) throw JobNotFound(job_id);
  return root_ / "jobs" / job_id;
}

std::mutex& FileJobStore::job_mutex(const std::string& job_id) {
  std::lock_guard lock(table_mu_);
  auto& slot = job_mutexes_[job_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

void FileJobStore::create(PipelineJob& job) {
  const auto dir = job_dir(job.job_id);
  std::error_code ec;
  if (!fs::create_directories(dir, ec)) {
    throw StorageError("cannot create job directory " + dir.string() + (ec ? ": " + ec.message() : " (exists)"));
  }
  std::lock_guard lock(job_mutex(job.job_id));
  job.version = 0;
  commit(job, true);
}

void FileJobStore::save(PipelineJob& job) {
  std::lock_guard lock(job_mutex(job.job_id));
  commit(job, false);
}

// Caller holds the job mutex.
void FileJobStore::commit(PipelineJob& job, bool creating) {
  const auto dir = job_dir(job.job_id);
  Header stored;
  if (!creating) {
    if (!fs::exists(dir / kHeaderFile)) throw JobNotFound(job.job_id);
    stored = read_header(dir);
    if (stored.version != job.version) {
      throw ConcurrentModification("job " + job.job_id + " is at version " + std::to_string(stored.version) +
                                   ", save was based on " + std::to_string(job.version));
    }
    if (job.events.size() < stored.event_count) throw StorageError("event log of job " + job.job_id + " is append-only");
  }

  const auto events_path = dir / kEventsFile;
  std::error_code ec;
  if (fs::exists(events_path) && fs::file_size(events_path) > stored.events_bytes) {
    fs::resize_file(events_path, stored.events_bytes, ec);
    if (ec) throw StorageError("cannot truncate " + events_path.string() + ": " + ec.message());
  }
  std::string appended;
  for (size_t i = stored.event_count; i < job.events.size(); ++i) appended += json(job.events[i]).dump() + "\n";
  {
    std::ofstream out(events_path, std::ios::binary | std::ios::app);
    out.write(appended.data(), static_cast<std::streamsize>(appended.size()));
    out.flush();
    if (!out) throw StorageError("cannot append to " + events_path.string());
  }

  json header = job_header_to_json(job);
  header["version"] = job.version + 1;
  header["event_count"] = job.events.size();
  header["events_bytes"] = stored.events_bytes + appended.size();
  write_atomically(dir / kHeaderFile, header.dump(2));
  job.version += 1;

  {
    std::lock_guard lock(notify_mu_);
    ++changes_;
  }
  notify_cv_.notify_all();
}

PipelineJob FileJobStore::load(const std::string& job_id) {
  const auto dir = job_dir(job_id);
  std::lock_guard lock(job_mutex(job_id));
  if (!fs::exists(dir / kHeaderFile)) throw JobNotFound(job_id);
  const auto header = read_header(dir);
  PipelineJob job;
  try {
    job = job_header_from_json(header.body);
  } catch (const std::exception& e) {
    throw StorageError("corrupt job header in " + dir.string() + ": " + e.what());
  }
  job.events = read_events(dir, header);
  return job;
}

bool FileJobStore::exists(const std::string& job_id) {
  return is_valid_job_id(job_id) && fs::exists(job_dir(job_id) / kHeaderFile);
}

std::vector<std::string> FileJobStore::list_jobs() {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_ / "jobs")) {
    if (entry.is_directory() && fs::exists(entry.path() / kHeaderFile)) ids.push_back(entry.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void FileJobStore::put_asset(const std::string& job_id, int attempt, std::span<const std::uint8_t> bytes) {
  const auto dir = job_dir(job_id) / "attempts" / std::to_string(attempt);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw StorageError("cannot create " + dir.string() + ": " + ec.message());
  write_atomically(dir / "model.glb",
                   std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::vector<std::uint8_t> FileJobStore::get_asset(const std::string& job_id, int attempt) {
  const auto data = read_file(job_dir(job_id) / "attempts" / std::to_string(attempt) / "model.glb");
  return std::vector<std::uint8_t>(data.begin(), data.end());
}

fs::path FileJobStore::bundle_dir(const std::string& job_id) { return job_dir(job_id) / "bundle"; }

EventBatch FileJobStore::wait_for_events(const std::string& job_id, size_t offset, std::chrono::milliseconds timeout,
                                         std::stop_token stop) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    std::uint64_t seen;
    {
      std::lock_guard lock(notify_mu_);
      seen = changes_;
    }
    const auto job = load(job_id);
    EventBatch batch;
    batch.terminal = !job.events.empty() && job.events.back().is_terminal_event();
    if (offset < job.events.size()) {
      batch.events.assign(job.events.begin() + static_cast<std::ptrdiff_t>(offset), job.events.end());
    }
    if (!batch.events.empty() || batch.terminal || stop.stop_requested() ||
        std::chrono::steady_clock::now() >= deadline) {
      return batch;
    }
    std::unique_lock lock(notify_mu_);
    notify_cv_.wait_until(lock, stop, deadline, [&] { return changes_ != seen; });
  }
}

}  // namespace xrauthor::pipeline

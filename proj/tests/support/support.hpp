#pragma once

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <chrono>
#include <random>
#include <set>
#include <thread>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "xrauthor/agents/prompts.hpp"
#include "xrauthor/bundle/bundle.hpp"
#include "xrauthor/common/time.hpp"
#include "xrauthor/common/types.hpp"
#include "xrauthor/pipeline/job_store.hpp"
#include "xrauthor/pipeline/pipeline.hpp"
#include "xrauthor/providers/chat.hpp"
#include "xrauthor/providers/generation.hpp"
#include "xrauthor/service/server.hpp"
#include "xrauthor/providers/mock.hpp"
#include "xrauthor/providers/polling.hpp"
#include "xrauthor/providers/search.hpp"

namespace xrauthor::testing {

std::filesystem::path source_dir();
std::filesystem::path fixtures_dir(const std::string& set = "mock");
std::filesystem::path glb_dir();
std::filesystem::path cli_path();
std::filesystem::path server_path();

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
  std::chrono::milliseconds elapsed{0};
};

// Runs `program args...` with stdin fed from `input` and waits for it.
ProcessResult run_process(const std::filesystem::path& program, const std::vector<std::string>& args,
                          const std::string& input = "");

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p);
std::string read_text(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& s);

AuthoringRequest heart_request(bool require_approval = false, int max_attempts = 3);
ContentSpec heart_spec();
AssetMeta heart_asset();

nlohmann::json verdict_json(const std::map<Criterion, std::string>& failing_feedback);
std::string verdict_reply(const std::map<Criterion, std::string>& failing_feedback);

// Chat provider with per-agent reply queues keyed by system prompt. An empty
// queue falls through to `fallback`; every request is recorded.
class ScriptedChat final : public providers::ChatProvider {
 public:
  explicit ScriptedChat(std::shared_ptr<providers::ChatProvider> fallback = nullptr, bool images = true);

  void script(const std::string& system, std::vector<std::string> replies);
  // Throw this error on the next call for `system`.
  void fail_next(const std::string& system, std::function<void()> thrower);

  std::vector<providers::ChatRequest> requests() const;
  size_t calls_for(const std::string& system) const;

  bool supports_images() const override { return images_; }
  std::string name() const override { return "scripted-chat"; }

 protected:
  providers::ChatReply do_chat(const providers::ChatRequest& request) override;

 private:
  std::shared_ptr<providers::ChatProvider> fallback_;
  bool images_;
  mutable std::mutex mu_;
  std::map<std::string, std::deque<std::string>> replies_;
  std::map<std::string, std::deque<std::function<void()>>> failures_;
  std::vector<providers::ChatRequest> requests_;
};

// Generation provider driven by a queue of outcomes, one per started task.
class ScriptedGeneration final : public providers::GenerationProvider {
 public:
  struct Outcome {
    enum class Kind { Succeed, TaskFailed, StartThrows, FetchThrows } kind = Kind::Succeed;
    std::vector<std::uint8_t> bytes;  // for Succeed
    int pending_polls = 1;
  };

  explicit ScriptedGeneration(std::vector<std::uint8_t> default_bytes);
  void push(Outcome o);

  std::vector<std::string> prompts() const;

  std::string name() const override { return "scripted-generation"; }

 protected:
  std::string do_start(const std::string& prompt) override;
  providers::GenerationTask do_get(const std::string& task_id) override;
  std::vector<std::uint8_t> do_fetch(const std::string& model_url) override;

 private:
  struct Task {
    Outcome outcome;
    int polls = 0;
  };
  mutable std::mutex mu_;
  std::vector<std::uint8_t> default_bytes_;
  std::deque<Outcome> queue_;
  std::map<std::string, Task> tasks_;
  std::vector<std::string> prompts_;
};

// Search provider returning fixed results or throwing.
class ScriptedSearch final : public providers::SearchProvider {
 public:
  std::vector<providers::SearchResult> results;
  bool fail = false;
  int calls = 0;

  std::string name() const override { return "scripted-search"; }

 protected:
  std::vector<providers::SearchResult> do_search(const std::string& query, int k) override;
};

std::vector<providers::SearchResult> heart_search_results();

// A job store plus mock providers in a temp dir, with virtual time.
struct Harness {
  explicit Harness(const std::string& fixture_set = "mock");

  TempDir dir;
  agents::PromptSet prompts;
  std::shared_ptr<ScriptedChat> chat;
  std::shared_ptr<providers::GenerationProvider> generation;
  std::shared_ptr<providers::SearchProvider> search;
  std::unique_ptr<pipeline::FileJobStore> store;
  SteppedClock clock;
  SeededIdSource ids;
  providers::ManualWaiter waiter;

  pipeline::StageDependencies deps();
  std::string submit(const AuthoringRequest& request);
  pipeline::PipelineJob run(const std::string& job_id);
};

// Random values for property tests.
struct Gen {
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  std::mt19937_64 rng;

  int range(int lo, int hi);  // inclusive
  bool coin(double p = 0.5);
  std::string word();
  std::string phrase(int min_words = 1, int max_words = 6);
  std::string url();
  double unit();
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<size_t>(range(0, static_cast<int>(v.size()) - 1))];
  }

  GradeBand grade();
  AuthoringRequest request();
  ContentSpec spec();
  SafetyVerdict verdict(bool approved);
  TutorPack tutor_pack();
};

// One job driven to a terminal state by scripted providers whose behaviour
// (verdicts, malformed replies, provider failures, corrupt assets, approval
// decisions, teacher edits) is drawn from `gen`. Returns the persisted job.
pipeline::PipelineJob random_scripted_run(Gen& gen);

// Inputs for a finished job built from random records and a corpus model.
bundle::BundleInputs random_bundle_inputs(Gen& gen);

// GlbError kind expected for an error code of the reference glTF validator.
std::string glb_kind_for_reference_code(const std::string& code);

inline const std::string kTestSecret = "sk-test-7f3a9c2e51d04b8e";

// An in-process API server on an ephemeral port, backed by mock providers
// wrapped in a ScriptedChat. kTestSecret is a configured credential.
struct ServerHarness {
  TempDir dir;
  std::shared_ptr<ScriptedChat> chat;
  agents::PromptSet prompts;
  std::unique_ptr<service::Server> server;
  int port = 0;
  std::thread thread;

  explicit ServerHarness(const std::string& fixture_set = "mock", service::ServerOptions options = {});
  ~ServerHarness();

  httplib::Client client() const;
  std::string submit(const nlohmann::json& body);
  nlohmann::json view(const std::string& id);
  // Polls until the job reaches one of `states`; throws after 20 s.
  nlohmann::json wait_for(const std::string& id, const std::set<std::string>& states);
};

struct SseFrame {
  std::string id;
  std::string event;
  nlohmann::json data;
};

// Splits an event-stream body into frames; comment blocks are counted.
std::vector<SseFrame> parse_sse(const std::string& body, int* comments = nullptr);

}  // namespace xrauthor::testing

// xrauthor: run the authoring pipeline in-process, resume a stored job, or
// inspect a bundle.
//
//   xrauthor run --prompt "..." --grade 6-8 [--out DIR] [--provider-mode mock]
//   xrauthor resume --data-dir DIR JOB_ID [--out DIR]
//   xrauthor inspect BUNDLE_DIR

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>

#include "xrauthor/agents/prompts.hpp"
#include "xrauthor/bundle/bundle.hpp"
#include "xrauthor/common/errors.hpp"
#include "xrauthor/common/text.hpp"
#include "xrauthor/pipeline/pipeline.hpp"
#include "xrauthor/providers/config.hpp"

namespace fs = std::filesystem;
using namespace xrauthor;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitSafetyExhausted = 2;
constexpr int kExitInterrupted = 130;

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

struct RunOptions {
  std::string prompt;
  std::string grade = "6-8";
  std::string subject;
  std::string topic;
  std::string out = "xrauthor-out";
  bool approval = false;
  int max_attempts = 3;
  std::string provider_mode;
  std::optional<std::uint64_t> seed;
  bool json_events = false;
  std::string fixtures;
  std::string data_dir;
  std::string prompts_dir;
  std::string config_file;
  int poll_interval_ms = -1;
  std::string job_id;  // resume only
};

void print_event(const pipeline::JobEvent& e, bool as_json, const std::vector<std::string>& secrets) {
  if (as_json) {
    std::cout << text::redact(json(e).dump(), secrets) << std::endl;
    return;
  }
  std::cout << format_timestamp(e.timestamp) << "  " << pipeline::to_string(e.stage) << "  "
            << pipeline::to_string(e.kind) << "  attempt " << e.attempt;
  if (!e.detail.empty()) std::cout << "  " << text::redact(e.detail, secrets);
  std::cout << std::endl;
}

void write_json_file(const fs::path& path, const json& j) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << "\n";
  if (!out) throw StorageError("cannot write " + path.string());
}

void copy_bundle(const fs::path& from, const fs::path& to) {
  fs::create_directories(to);
  for (const char* name : {bundle::kModelFile, bundle::kTutorFile, bundle::kManifestFile}) {
    fs::copy_file(from / name, to / name, fs::copy_options::overwrite_existing);
  }
}

// Removes the scratch data directory unless the caller asked to keep one.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& requested) {
    if (!requested.empty()) {
      path_ = requested;
      return;
    }
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = fs::temp_directory_path() / ("xrauthor-run-" + std::to_string(stamp));
    owned_ = true;
  }
  ~ScratchDir() {
    if (owned_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  bool owned_ = false;
};

int drive(const RunOptions& opts, bool resuming) {
  auto config = providers::load_provider_config(
      providers::process_environment(),
      opts.config_file.empty() ? std::nullopt : std::optional<fs::path>(opts.config_file));
  if (!opts.provider_mode.empty()) {
    auto mode = providers::parse_provider_mode(opts.provider_mode);
    if (!mode) throw InvalidArgument("--provider-mode must be mock or live");
    config.mode = *mode;
  }
  if (!opts.fixtures.empty()) config.mock_fixture_dir = opts.fixtures;
  const auto secrets = config.secrets();
  auto providers = providers::make_providers(config);
  const auto prompts = agents::PromptSet::load(opts.prompts_dir.empty() ? agents::default_prompts_dir()
                                                                        : fs::path(opts.prompts_dir));

  ScratchDir data(opts.data_dir);
  pipeline::FileJobStore store(data.path());

  std::unique_ptr<Clock> clock;
  std::unique_ptr<IdSource> ids;
  if (opts.seed) {
    clock = std::make_unique<SteppedClock>(parse_timestamp("2025-01-01T00:00:00.000Z"));
    ids = std::make_unique<SeededIdSource>(*opts.seed);
  } else {
    clock = std::make_unique<SystemClock>();
    ids = std::make_unique<RandomIdSource>();
  }

  std::stop_source stop;
  std::signal(SIGINT, on_sigint);
  std::jthread watcher([&stop](std::stop_token done) {
    while (!done.stop_requested()) {
      if (g_interrupted.load()) {
        stop.request_stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  });

  providers::SteadyWaiter waiter;
  pipeline::StageDependencies deps;
  deps.chat = providers.chat.get();
  deps.generation = providers.generation.get();
  deps.search = providers.search.get();
  deps.prompts = &prompts;
  deps.store = &store;
  deps.clock = clock.get();
  deps.waiter = &waiter;
  const int interval =
      opts.poll_interval_ms >= 0 ? opts.poll_interval_ms : (config.mode == providers::ProviderMode::Mock ? 20 : 5000);
  deps.poll.interval = std::chrono::milliseconds(interval);
  deps.stop = stop.get_token();
  deps.secrets = secrets;

  std::string job_id = opts.job_id;
  if (!resuming) {
    AuthoringRequest request;
    request.prompt_text = opts.prompt;
    auto band = parse_grade_band(opts.grade);
    if (!band) throw ValidationError("grade_band", "must be one of K-2, 3-5, 6-8, 9-12");
    request.grade_band = *band;
    request.subject = opts.subject;
    request.topic = opts.topic;
    request.require_approval = opts.approval;
    request.max_safety_attempts = opts.max_attempts;
    job_id = pipeline::submit(request, store, *clock, *ids);
  }
  std::cout << "job " << job_id << std::endl;

  size_t printed = 0;
  auto print_new = [&](const pipeline::PipelineJob& job) {
    for (; printed < job.events.size(); ++printed) print_event(job.events[printed], opts.json_events, secrets);
  };
  print_new(store.load(job_id));

  pipeline::PipelineJob job;
  try {
    job = pipeline::run_until_blocked(job_id, deps, print_new);
    while (job.state == pipeline::JobState::AwaitingApproval) {
      std::cout << "content spec awaiting approval:\n" << json(*job.spec).dump(2) << "\napprove? [y/N] " << std::flush;
      std::string answer;
      std::getline(std::cin, answer);
      const auto decision = (answer == "y" || answer == "Y" || answer == "yes") ? pipeline::ApprovalDecision::Approve
                                                                                 : pipeline::ApprovalDecision::Reject;
      job = pipeline::resolve_approval(std::move(job), decision, std::nullopt, store, *clock);
      print_new(job);
      job = pipeline::run_until_blocked(job_id, deps, print_new);
    }
  } catch (const Cancelled&) {
    std::cerr << "interrupted; job " << job_id << " stopped in its last persisted state";
    if (!opts.data_dir.empty()) std::cerr << " and can be resumed";
    std::cerr << std::endl;
    return kExitInterrupted;
  }

  const fs::path out = opts.out;
  if (job.state == pipeline::JobState::Complete) {
    copy_bundle(store.bundle_dir(job_id), out);
    std::cout << "bundle written to " << out.string() << std::endl;
    return kExitOk;
  }
  if (job.failure_reason == pipeline::FailureReason::SafetyExhausted) {
    write_json_file(out / "verdicts.json", json(job.verdict_history));
    std::cerr << "safety review rejected every attempt; verdicts written to " << (out / "verdicts.json").string()
              << std::endl;
    return kExitSafetyExhausted;
  }
  std::cerr << "job failed: " << (job.failure_reason ? pipeline::to_string(*job.failure_reason) : "?") << ": "
            << job.failure_detail << std::endl;
  return kExitFailed;
}

int inspect(const std::string& dir, bool as_json) {
  const auto manifest = bundle::read_bundle(dir);
  if (as_json) {
    std::cout << bundle::manifest_to_json(manifest).dump(2) << std::endl;
    return kExitOk;
  }
  const auto& a = manifest.asset;
  const auto& t = manifest.tutor_pack;
  std::cout << "bundle " << manifest.bundle_id << " (schema " << manifest.schema_version << ", created "
            << format_timestamp(manifest.created_at) << ")\n"
            << "concept: " << manifest.spec.core_concept << " [" << to_string(manifest.spec.grade_band) << "]\n"
            << "verdicts: " << manifest.verdicts.size() << ", last "
            << (manifest.verdicts.back().approved ? "approved" : "rejected") << "\n"
            << "asset: " << a.byte_length << " bytes, " << a.mesh_count << " mesh(es), " << a.triangle_count
            << " triangles, sha256 " << a.sha256 << "\n"
            << "tutor: " << t.annotations.size() << " annotation(s), " << t.vocabulary.size() << " term(s), "
            << t.quiz.size() << " question(s), " << t.readings.size() << " reading(s)" << std::endl;
  return kExitOk;
}

void add_provider_flags(CLI::App* cmd, RunOptions& opts) {
  cmd->add_option("--out", opts.out, "Directory that receives the bundle (or verdicts.json)");
  cmd->add_option("--provider-mode", opts.provider_mode, "mock or live (default: from environment)");
  cmd->add_option("--fixtures", opts.fixtures, "Mock fixture directory");
  cmd->add_option("--prompts-dir", opts.prompts_dir, "Directory holding the agent prompts");
  cmd->add_option("--config", opts.config_file, "JSON file with non-secret provider settings");
  cmd->add_option("--poll-interval-ms", opts.poll_interval_ms, "Generation poll interval");
  cmd->add_flag("--json", opts.json_events, "Print events as JSON lines");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"XR lesson authoring pipeline"};
  app.require_subcommand(1);
  RunOptions opts;
  bool inspect_json = false;
  std::string inspect_dir;

  auto* run = app.add_subcommand("run", "Run a new job to completion");
  run->add_option("--prompt", opts.prompt, "Teacher request")->required();
  run->add_option("--grade", opts.grade, "Grade band: K-2, 3-5, 6-8 or 9-12");
  run->add_option("--subject", opts.subject, "Subject, e.g. Biology");
  run->add_option("--topic", opts.topic, "Topic");
  auto* approval = run->add_flag("--approval", opts.approval, "Ask for approval of the content spec on stdin");
  run->add_flag("--no-approval", "Skip the approval gate (default)")->excludes(approval);
  run->add_option("--max-attempts", opts.max_attempts, "Safety review attempts")->check(CLI::PositiveNumber);
  std::uint64_t seed = 0;
  auto* seed_opt = run->add_option("--seed", seed, "Deterministic clock and job ids");
  run->add_option("--data-dir", opts.data_dir, "Keep job state here (default: temporary)");
  add_provider_flags(run, opts);

  auto* resume = app.add_subcommand("resume", "Continue a stored job from its persisted state");
  resume->add_option("job_id", opts.job_id, "Job id")->required();
  resume->add_option("--data-dir", opts.data_dir, "Job store root")->required();
  add_provider_flags(resume, opts);

  auto* insp = app.add_subcommand("inspect", "Validate a bundle and print a summary");
  insp->add_option("bundle_dir", inspect_dir, "Bundle directory")->required();
  insp->add_flag("--json", inspect_json, "Print the manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return kExitOk;
    std::cerr << "\n" << app.help("", CLI::AppFormatMode::All);
    return kExitFailed;
  }

  try {
    if (*seed_opt) opts.seed = seed;
    if (*run) return drive(opts, false);
    if (*resume) return drive(opts, true);
    return inspect(inspect_dir, inspect_json);
  } catch (const ValidationError& e) {
    std::cerr << "invalid request:";
    for (const auto& [field, message] : e.fields()) std::cerr << " " << field << " " << message << ";";
    std::cerr << std::endl;
  } catch (const Error& e) {
    std::cerr << e.kind() << ": " << e.what() << std::endl;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
  }
  return kExitFailed;
}

#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include "xrauthor/bundle/glb.hpp"
#include "xrauthor/common/errors.hpp"

namespace xrauthor::testing {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path source_dir() { return XRAUTHOR_SOURCE_DIR; }
fs::path fixtures_dir(const std::string& set) { return source_dir() / "fixtures" / set; }
fs::path glb_dir() { return source_dir() / "tests" / "data" / "glb"; }
fs::path cli_path() { return XRAUTHOR_CLI_PATH; }
fs::path server_path() { return XRAUTHOR_SERVER_PATH; }

ProcessResult run_process(const fs::path& program, const std::vector<std::string>& args, const std::string& input) {
  TempDir io;
  write_text(io / "in", input);
  std::vector<std::string> argv_storage{program.string()};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  argv.push_back(nullptr);
  const auto in_path = (io / "in").string(), out_path = (io / "out").string(), err_path = (io / "err").string();

  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork failed");
  if (pid == 0) {
    const int in = open(in_path.c_str(), O_RDONLY);
    const int out = open(out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    const int err = open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    if (in < 0 || out < 0 || err < 0) _exit(127);
    dup2(in, 0);
    dup2(out, 1);
    dup2(err, 2);
    execv(argv[0], argv.data());
    _exit(127);
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw std::runtime_error("waitpid failed");
  }
  ProcessResult r;
  r.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  r.out = read_text(io / "out");
  r.err = read_text(io / "err");
  return r;
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("xrauthor-test-" + std::to_string(rd()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_text(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

AuthoringRequest heart_request(bool require_approval, int max_attempts) {
  AuthoringRequest r;
  r.prompt_text = "a 3D model of a human heart for a middle school biology class";
  r.grade_band = GradeBand::G6_8;
  r.subject = "Biology";
  r.topic = "Circulatory system";
  r.require_approval = require_approval;
  r.max_safety_attempts = max_attempts;
  return r;
}

ContentSpec heart_spec() {
  ContentSpec s;
  s.core_concept = "human heart anatomy";
  s.grade_band = GradeBand::G6_8;
  s.learning_objectives = {"Identify the four chambers of the human heart",
                           "Trace the path of blood through the heart and its valves"};
  s.required_visual_features = {"left atrium", "right atrium", "left ventricle", "right ventricle", "aorta"};
  s.complexity_notes = "Stylized cutaway, no gore.";
  s.refined_prompt =
      "A stylized cutaway model of a human heart showing the left atrium, right atrium, left ventricle, right "
      "ventricle and the aorta.";
  s.labeling_requirements = {"Label the four chambers"};
  return s;
}

AssetMeta heart_asset() { return bundle::validate_glb(read_bytes(fixtures_dir() / "assets" / "heart.glb")); }

json verdict_json(const std::map<Criterion, std::string>& failing_feedback) {
  json criteria = json::array();
  std::string summary;
  for (auto c : kAllCriteria) {
    auto it = failing_feedback.find(c);
    const bool pass = it == failing_feedback.end();
    criteria.push_back({{"key", to_string(c)},
                        {"pass", pass},
                        {"rationale", pass ? "Meets the bar." : "Fails: " + criterion_label(c) + "."},
                        {"feedback", pass ? "" : it->second}});
    if (!pass) summary += (summary.empty() ? "" : " ") + it->second;
  }
  return json{{"criteria", criteria}, {"approved", failing_feedback.empty()}, {"revision_feedback", summary}};
}

std::string verdict_reply(const std::map<Criterion, std::string>& failing_feedback) {
  return verdict_json(failing_feedback).dump();
}

ScriptedChat::ScriptedChat(std::shared_ptr<providers::ChatProvider> fallback, bool images)
    : fallback_(std::move(fallback)), images_(images) {}

void ScriptedChat::script(const std::string& system, std::vector<std::string> replies) {
  std::lock_guard lock(mu_);
  auto& q = replies_[system];
  for (auto& r : replies) q.push_back(std::move(r));
}

void ScriptedChat::fail_next(const std::string& system, std::function<void()> thrower) {
  std::lock_guard lock(mu_);
  failures_[system].push_back(std::move(thrower));
}

std::vector<providers::ChatRequest> ScriptedChat::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

size_t ScriptedChat::calls_for(const std::string& system) const {
  std::lock_guard lock(mu_);
  return static_cast<size_t>(std::count_if(requests_.begin(), requests_.end(),
                                           [&](const auto& r) { return r.system == system; }));
}

providers::ChatReply ScriptedChat::do_chat(const providers::ChatRequest& request) {
  std::function<void()> thrower;
  std::optional<std::string> scripted;
  {
    std::lock_guard lock(mu_);
    requests_.push_back(request);
    if (auto f = failures_.find(request.system); f != failures_.end() && !f->second.empty()) {
      thrower = std::move(f->second.front());
      f->second.pop_front();
    } else if (auto it = replies_.find(request.system); it != replies_.end() && !it->second.empty()) {
      scripted = std::move(it->second.front());
      it->second.pop_front();
    }
  }
  if (thrower) thrower();
  if (scripted) return providers::ChatReply{*scripted, {}};
  if (!fallback_) throw ProviderError("scripted chat has no reply left");
  return fallback_->chat(request);
}

ScriptedGeneration::ScriptedGeneration(std::vector<std::uint8_t> default_bytes)
    : default_bytes_(std::move(default_bytes)) {}

void ScriptedGeneration::push(Outcome o) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(o));
}

std::vector<std::string> ScriptedGeneration::prompts() const {
  std::lock_guard lock(mu_);
  return prompts_;
}

std::string ScriptedGeneration::do_start(const std::string& prompt) {
  std::lock_guard lock(mu_);
  prompts_.push_back(prompt);
  Outcome o;
  if (!queue_.empty()) {
    o = std::move(queue_.front());
    queue_.pop_front();
  }
  if (o.kind == Outcome::Kind::StartThrows) throw ServerError("scripted generation start failure");
  if (o.kind == Outcome::Kind::Succeed && o.bytes.empty()) o.bytes = default_bytes_;
  const auto id = "task-" + std::to_string(prompts_.size());
  tasks_[id] = Task{std::move(o), 0};
  return id;
}

providers::GenerationTask ScriptedGeneration::do_get(const std::string& task_id) {
  std::lock_guard lock(mu_);
  auto it = tasks_.find(task_id);
  if (it == tasks_.end()) throw UnknownTask(task_id);
  auto& t = it->second;
  providers::GenerationTask task;
  task.task_id = task_id;
  if (t.polls++ < t.outcome.pending_polls) {
    task.status = providers::TaskStatus::InProgress;
    task.progress = 50;
    return task;
  }
  if (t.outcome.kind == Outcome::Kind::TaskFailed) {
    task.status = providers::TaskStatus::Failed;
    task.failure_reason = "scripted generation failure";
    return task;
  }
  task.status = providers::TaskStatus::Succeeded;
  task.progress = 100;
  task.model_url = "scripted://" + task_id;
  task.preview_image_url = "https://preview.example.org/" + task_id + ".png";
  return task;
}

std::vector<std::uint8_t> ScriptedGeneration::do_fetch(const std::string& model_url) {
  std::lock_guard lock(mu_);
  const auto id = model_url.substr(std::string("scripted://").size());
  auto it = tasks_.find(id);
  if (it == tasks_.end()) throw NotFound(model_url);
  if (it->second.outcome.kind == Outcome::Kind::FetchThrows) throw NetworkError("scripted truncated download");
  return it->second.outcome.bytes;
}

std::vector<providers::SearchResult> ScriptedSearch::do_search(const std::string&, int) {
  ++calls;
  if (fail) throw SearchError("scripted search outage");
  return results;
}

std::vector<providers::SearchResult> heart_search_results() {
  const auto j = json::parse(read_text(fixtures_dir() / "search" / "human-heart-anatomy-grade-6-8.json"));
  std::vector<providers::SearchResult> out;
  for (const auto& r : j.at("results")) {
    out.push_back({r.at("title"), r.at("url"), r.at("snippet"), r.at("score")});
  }
  return out;
}

Harness::Harness(const std::string& fixture_set)
    : prompts(agents::PromptSet::load(source_dir() / "prompts")),
      clock(parse_timestamp("2025-01-01T00:00:00.000Z")),
      ids(7) {
  providers::FixtureDir fixtures(fixtures_dir(fixture_set));
  chat = std::make_shared<ScriptedChat>(std::make_shared<providers::MockChatProvider>(fixtures));
  generation = std::make_shared<providers::MockGenerationProvider>(fixtures);
  search = std::make_shared<providers::MockSearchProvider>(fixtures);
  store = std::make_unique<pipeline::FileJobStore>(dir.path() / "data");
}

pipeline::StageDependencies Harness::deps() {
  pipeline::StageDependencies d;
  d.chat = chat.get();
  d.generation = generation.get();
  d.search = search.get();
  d.prompts = &prompts;
  d.store = store.get();
  d.clock = &clock;
  d.waiter = &waiter;
  return d;
}

std::string Harness::submit(const AuthoringRequest& request) { return pipeline::submit(request, *store, clock, ids); }

pipeline::PipelineJob Harness::run(const std::string& job_id) { return pipeline::run_until_blocked(job_id, deps()); }

int Gen::range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool Gen::coin(double p) { return std::bernoulli_distribution(p)(rng); }
double Gen::unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::string Gen::word() {
  static const std::vector<std::string> words = {
      "heart", "valve", "cell", "membrane", "orbit", "crater", "leaf", "root", "atom", "proton", "naïve",
      "quote\"d", "back\\slash", "tab\tbed", "日本", "émigré", "x", "long-hyphenated-word", "<tag>", "100%"};
  return pick(words);
}

std::string Gen::phrase(int min_words, int max_words) {
  const int n = range(min_words, max_words);
  std::string out;
  for (int i = 0; i < n; ++i) out += (i ? " " : "") + word();
  return out;
}

std::string Gen::url() { return "https://site" + std::to_string(range(0, 99)) + ".example.org/p/" + std::to_string(range(0, 9999)); }

GradeBand Gen::grade() {
  static const std::vector<GradeBand> all = {GradeBand::K2, GradeBand::G3_5, GradeBand::G6_8, GradeBand::G9_12};
  return pick(all);
}

AuthoringRequest Gen::request() {
  AuthoringRequest r;
  r.prompt_text = phrase(1, 12);
  r.grade_band = grade();
  r.subject = coin() ? phrase(1, 2) : "";
  r.topic = coin() ? phrase(1, 3) : "";
  r.require_approval = coin();
  r.max_safety_attempts = range(1, 5);
  return r;
}

ContentSpec Gen::spec() {
  ContentSpec s;
  s.core_concept = phrase(1, 4);
  s.grade_band = grade();
  for (int i = range(1, 6); i > 0; --i) s.learning_objectives.push_back(phrase(2, 8));
  for (int i = range(1, 12); i > 0; --i) s.required_visual_features.push_back(word() + " part" + std::to_string(i));
  s.complexity_notes = coin() ? phrase(0, 10) : "";
  s.refined_prompt = "Model of " + s.core_concept + " showing ";
  for (const auto& f : s.required_visual_features) s.refined_prompt += f + ", ";
  s.refined_prompt += phrase(1, 5);
  for (int i = range(0, 12); i > 0; --i) s.labeling_requirements.push_back(phrase(1, 5));
  return s;
}

SafetyVerdict Gen::verdict(bool approved) {
  SafetyVerdict v;
  std::vector<Criterion> keys(kAllCriteria.begin(), kAllCriteria.end());
  std::shuffle(keys.begin(), keys.end(), rng);
  std::set<Criterion> failing;
  if (!approved) {
    failing.insert(pick(keys));
    for (auto k : keys) {
      if (coin(0.3)) failing.insert(k);
    }
  }
  for (auto k : keys) {
    const bool pass = !failing.count(k);
    v.criteria.push_back({k, pass, phrase(1, 8), pass ? "" : phrase(1, 8)});
  }
  v.approved = approved;
  v.revision_feedback = approved ? "" : phrase(1, 10);
  v.reviewed_inputs = coin() ? ReviewedInputs::TextOnly : ReviewedInputs::TextAndImage;
  return v;
}

TutorPack Gen::tutor_pack() {
  TutorPack t;
  t.overview = phrase(0, 20);
  for (int i = range(1, 20); i > 0; --i) {
    Annotation a{phrase(1, 3), phrase(1, 10), std::nullopt};
    if (coin(0.7)) a.anchor = Vec3{unit(), unit(), unit()};
    t.annotations.push_back(a);
  }
  for (int i = range(1, 20); i > 0; --i) t.vocabulary.push_back({phrase(1, 2), phrase(2, 10)});
  for (int i = range(1, 10); i > 0; --i) {
    QuizQuestion q;
    q.stem = phrase(3, 10) + "?";
    for (int c = range(2, 5), j = 0; j < c; ++j) q.choices.push_back(phrase(1, 3) + " #" + std::to_string(j));
    q.correct_index = range(0, static_cast<int>(q.choices.size()) - 1);
    q.explanation = phrase(0, 10);
    t.quiz.push_back(q);
  }
  for (int i = range(0, 10); i > 0; --i) t.readings.push_back({phrase(1, 5), url(), phrase(0, 12)});
  return t;
}

pipeline::PipelineJob random_scripted_run(Gen& gen) {
  using Kind = ScriptedGeneration::Outcome::Kind;
  TempDir dir;
  const auto prompts = agents::PromptSet::load(source_dir() / "prompts");
  providers::FixtureDir fixtures(fixtures_dir());
  ScriptedChat chat(std::make_shared<providers::MockChatProvider>(fixtures), gen.coin(0.8));
  ScriptedGeneration generation(read_bytes(fixtures_dir() / "assets" / "heart.glb"));
  ScriptedSearch search;
  search.results = heart_search_results();
  search.fail = gen.coin(0.2);
  pipeline::FileJobStore store(dir / "data");
  SteppedClock clock(parse_timestamp("2025-01-01T00:00:00.000Z"));
  SeededIdSource ids(gen.rng());
  providers::ManualWaiter waiter;

  auto request = heart_request(gen.coin(), gen.range(1, 4));
  request.grade_band = gen.grade();

  auto maybe_fail = [&](const std::string& system) {
    if (!gen.coin(0.08)) return;
    if (gen.coin()) {
      chat.fail_next(system, [] { throw ServerError("scripted outage"); });
    } else {
      // Three unusable replies exhaust the repair budget.
      chat.script(system, {"no json", "{\"still\": \"wrong\"}", "[]"});
    }
  };

  maybe_fail(prompts.pedagogical.system);
  for (int attempt = 1; attempt <= request.max_safety_attempts; ++attempt) {
    ScriptedGeneration::Outcome o;
    const int roll = gen.range(0, 99);
    if (roll < 4) {
      o.kind = Kind::TaskFailed;
    } else if (roll < 7) {
      o.kind = Kind::FetchThrows;
    } else if (roll < 9) {
      o.kind = Kind::StartThrows;
    } else if (roll < 11) {
      o.bytes = {'n', 'o', 't', ' ', 'g', 'l', 'b'};
    }
    o.pending_polls = gen.range(0, 3);
    generation.push(o);

    maybe_fail(prompts.safeguard.system);
    std::vector<std::string> replies;
    if (gen.coin(0.15)) replies.push_back("I would rather describe it in prose.");
    replies.push_back(nlohmann::json(gen.verdict(gen.coin(0.35))).dump());
    chat.script(prompts.safeguard.system, replies);
  }
  maybe_fail(prompts.tutor.system);

  pipeline::StageDependencies deps;
  deps.chat = &chat;
  deps.generation = &generation;
  deps.search = &search;
  deps.prompts = &prompts;
  deps.store = &store;
  deps.clock = &clock;
  deps.waiter = &waiter;

  const auto id = pipeline::submit(request, store, clock, ids);
  auto job = pipeline::run_until_blocked(id, deps);
  while (job.state == pipeline::JobState::AwaitingApproval) {
    const int choice = gen.range(0, 3);
    if (choice == 0) {
      job = pipeline::resolve_approval(job, pipeline::ApprovalDecision::Reject, std::nullopt, store, clock);
    } else if (choice == 1) {
      auto broken = *job.spec;
      broken.learning_objectives.clear();
      try {
        pipeline::resolve_approval(job, pipeline::ApprovalDecision::Approve, broken, store, clock);
      } catch (const ValidationError&) {
      }
      job = store.load(id);
    } else {
      auto edited = *job.spec;
      if (choice == 3) edited.complexity_notes = gen.phrase();
      job = pipeline::resolve_approval(job, pipeline::ApprovalDecision::Approve,
                                       choice == 3 ? std::optional(edited) : std::nullopt, store, clock);
      job = pipeline::run_until_blocked(id, deps);
    }
  }
  return store.load(id);
}

bundle::BundleInputs random_bundle_inputs(Gen& gen) {
  static const std::vector<std::string> models = {"triangle", "indexed_quad", "two_meshes", "triangle_strip", "cube",
                                                  "heart"};
  bundle::BundleInputs in;
  in.bundle_id = "b" + std::to_string(gen.range(0, 1 << 30));
  in.request = gen.request();
  in.spec = gen.spec();
  for (int i = gen.range(0, 3); i > 0; --i) in.verdicts.push_back(gen.verdict(false));
  in.verdicts.push_back(gen.verdict(true));
  in.tutor_pack = gen.tutor_pack();
  in.asset_bytes = read_bytes(glb_dir() / "good" / (gen.pick(models) + ".glb"));
  in.asset = bundle::validate_glb(in.asset_bytes);
  in.created_at = parse_timestamp("2025-01-01T00:00:00.000Z") + std::chrono::milliseconds(gen.range(0, 1 << 30));
  return in;
}

std::string glb_kind_for_reference_code(const std::string& code) {
  static const std::map<std::string, std::string> kinds = {{"UNRECOGNIZED_FORMAT", "BadMagic"},
                                                           {"GLB_INVALID_VERSION", "UnsupportedVersion"},
                                                           {"GLB_LENGTH_MISMATCH", "LengthMismatch"},
                                                           {"INVALID_JSON", "MalformedJsonChunk"},
                                                           {"EMPTY_ENTITY", "NoMeshes"}};
  auto it = kinds.find(code);
  return it == kinds.end() ? "" : it->second;
}

ServerHarness::ServerHarness(const std::string& fixture_set, service::ServerOptions options)
    : prompts(agents::PromptSet::load(source_dir() / "prompts")) {
  providers::FixtureDir fixtures(fixtures_dir(fixture_set));
  chat = std::make_shared<ScriptedChat>(std::make_shared<providers::MockChatProvider>(fixtures));
  service::ServiceContext ctx;
  ctx.store = std::make_shared<pipeline::FileJobStore>(dir / "data");
  ctx.providers.chat = chat;
  ctx.providers.generation = std::make_shared<providers::MockGenerationProvider>(fixtures);
  ctx.providers.search = std::make_shared<providers::MockSearchProvider>(fixtures);
  ctx.prompts = prompts;
  ctx.clock = std::make_shared<SystemClock>();
  ctx.ids = std::make_shared<RandomIdSource>();
  ctx.waiter = std::make_shared<providers::SteadyWaiter>();
  ctx.poll.interval = std::chrono::milliseconds(20);
  ctx.secrets = {kTestSecret};
  options.keepalive = std::chrono::milliseconds(200);
  server = std::make_unique<service::Server>(std::move(ctx), std::move(options));
  port = server->bind("127.0.0.1", 0);
  thread = std::thread([this] { server->serve(); });
}

ServerHarness::~ServerHarness() {
  server->stop();
  thread.join();
}

httplib::Client ServerHarness::client() const {
  httplib::Client c("127.0.0.1", port);
  c.set_read_timeout(std::chrono::seconds(20));
  return c;
}

std::string ServerHarness::submit(const json& body) {
  auto res = client().Post("/api/jobs", body.dump(), "application/json");
  if (!res || res->status != 201) throw std::runtime_error("POST /api/jobs did not return 201");
  return json::parse(res->body).at("job_id").get<std::string>();
}

json ServerHarness::view(const std::string& id) {
  auto res = client().Get("/api/jobs/" + id);
  if (!res || res->status != 200) throw std::runtime_error("GET /api/jobs/" + id + " did not return 200");
  return json::parse(res->body);
}

json ServerHarness::wait_for(const std::string& id, const std::set<std::string>& states) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(20);
  while (std::chrono::steady_clock::now() < deadline) {
    auto v = view(id);
    if (states.count(v["state"].get<std::string>())) return v;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  throw std::runtime_error("job " + id + " never reached the expected state");
}

std::vector<SseFrame> parse_sse(const std::string& body, int* comments) {
  std::vector<SseFrame> frames;
  size_t pos = 0;
  while (pos < body.size()) {
    const auto end = body.find("\n\n", pos);
    if (end == std::string::npos) break;
    const auto block = body.substr(pos, end - pos);
    pos = end + 2;
    if (block.starts_with(":")) {
      if (comments) ++*comments;
      continue;
    }
    SseFrame f;
    std::istringstream lines(block);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.starts_with("id: ")) f.id = line.substr(4);
      if (line.starts_with("event: ")) f.event = line.substr(7);
      if (line.starts_with("data: ")) f.data = json::parse(line.substr(6));
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace xrauthor::testing

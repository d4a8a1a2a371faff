#include "xrauthor/pipeline/job.hpp"

#include <array>
#include <utility>

#include "xrauthor/common/errors.hpp"

namespace xrauthor::pipeline {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<JobState, const char*>, 9> kStateNames = {{
    {JobState::Received, "Received"},
    {JobState::Interpreting, "Interpreting"},
    {JobState::AwaitingApproval, "AwaitingApproval"},
    {JobState::Generating, "Generating"},
    {JobState::Reviewing, "Reviewing"},
    {JobState::Revising, "Revising"},
    {JobState::Enriching, "Enriching"},
    {JobState::Complete, "Complete"},
    {JobState::Failed, "Failed"},
}};

constexpr std::array<std::pair<FailureReason, const char*>, 3> kReasonNames = {{
    {FailureReason::TeacherRejected, "TeacherRejected"},
    {FailureReason::SafetyExhausted, "SafetyExhausted"},
    {FailureReason::ProviderError, "ProviderError"},
}};

constexpr std::array<std::pair<EventKind, const char*>, 5> kKindNames = {{
    {EventKind::StageEntered, "StageEntered"},
    {EventKind::StageCompleted, "StageCompleted"},
    {EventKind::ProviderCall, "ProviderCall"},
    {EventKind::Warning, "Warning"},
    {EventKind::Error, "Error"},
}};

template <class E, size_t N>
std::string name_of(const std::array<std::pair<E, const char*>, N>& table, E value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <class E, size_t N>
std::optional<E> value_of(const std::array<std::pair<E, const char*>, N>& table, std::string_view s) {
  for (const auto& [v, name] : table) {
    if (s == name) return v;
  }
  return std::nullopt;
}

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& value) {
  j[key] = value ? json(*value) : json(nullptr);
}

template <class T>
std::optional<T> get_optional(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

std::string to_string(JobState s) { return name_of(kStateNames, s); }
std::optional<JobState> parse_job_state(std::string_view s) { return value_of(kStateNames, s); }
std::string to_string(FailureReason r) { return name_of(kReasonNames, r); }
std::optional<FailureReason> parse_failure_reason(std::string_view s) { return value_of(kReasonNames, s); }
std::string to_string(EventKind k) { return name_of(kKindNames, k); }
std::optional<EventKind> parse_event_kind(std::string_view s) { return value_of(kKindNames, s); }

bool is_terminal(JobState s) { return s == JobState::Complete || s == JobState::Failed; }

std::vector<std::string> problems(const PipelineJob& job) {
  std::vector<std::string> out;
  if (job.attempt < 1) out.push_back("attempt must be at least 1");
  if (job.attempt > job.request.max_safety_attempts) out.push_back("attempt exceeds max_safety_attempts");
  if ((job.state == JobState::Failed) != job.failure_reason.has_value()) {
    out.push_back("failure_reason must be set exactly when the job failed");
  }
  if (job.state == JobState::Complete) {
    if (!job.spec || !job.asset || !job.tutor_pack) out.push_back("a complete job needs spec, asset and tutor_pack");
    if (job.verdict_history.empty() || !job.verdict_history.back().approved) {
      out.push_back("a complete job needs an approved last verdict");
    }
  }
  for (size_t i = 1; i < job.events.size(); ++i) {
    if (job.events[i].timestamp < job.events[i - 1].timestamp) {
      out.push_back("event timestamps must not decrease");
      break;
    }
  }
  return out;
}

void to_json(json& j, JobState s) { j = to_string(s); }

void from_json(const json& j, JobState& s) {
  auto parsed = parse_job_state(j.get<std::string>());
  if (!parsed) throw InvalidArgument("unknown job state: " + j.dump());
  s = *parsed;
}

void to_json(json& j, const JobEvent& e) {
  j = json{{"timestamp", format_timestamp(e.timestamp)},
           {"stage", e.stage},
           {"kind", to_string(e.kind)},
           {"detail", e.detail},
           {"attempt", e.attempt}};
}

void from_json(const json& j, JobEvent& e) {
  e.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
  e.stage = j.at("stage").get<JobState>();
  auto kind = parse_event_kind(j.at("kind").get<std::string>());
  if (!kind) throw InvalidArgument("unknown event kind: " + j.at("kind").dump());
  e.kind = *kind;
  e.detail = j.at("detail").get<std::string>();
  e.attempt = j.at("attempt").get<int>();
}

json job_header_to_json(const PipelineJob& job) {
  json j{{"job_id", job.job_id},
         {"version", job.version},
         {"request", job.request},
         {"state", job.state},
         {"failure_detail", job.failure_detail},
         {"attempt", job.attempt},
         {"verdict_history", job.verdict_history},
         {"generation_prompts", job.generation_prompts},
         {"created_at", format_timestamp(job.created_at)},
         {"updated_at", format_timestamp(job.updated_at)}};
  j["failure_reason"] = job.failure_reason ? json(to_string(*job.failure_reason)) : json(nullptr);
  put_optional(j, "spec", job.spec);
  put_optional(j, "asset", job.asset);
  put_optional(j, "tutor_pack", job.tutor_pack);
  put_optional(j, "preview_image_url", job.preview_image_url);
  put_optional(j, "bundle_id", job.bundle_id);
  return j;
}

PipelineJob job_header_from_json(const json& j) {
  PipelineJob job;
  job.job_id = j.at("job_id").get<std::string>();
  job.version = j.at("version").get<std::uint64_t>();
  job.request = j.at("request").get<AuthoringRequest>();
  job.state = j.at("state").get<JobState>();
  if (auto r = get_optional<std::string>(j, "failure_reason")) {
    job.failure_reason = parse_failure_reason(*r);
    if (!job.failure_reason) throw InvalidArgument("unknown failure reason: " + *r);
  }
  job.failure_detail = j.at("failure_detail").get<std::string>();
  job.attempt = j.at("attempt").get<int>();
  job.verdict_history = j.at("verdict_history").get<std::vector<SafetyVerdict>>();
  job.generation_prompts = j.at("generation_prompts").get<std::vector<std::string>>();
  job.created_at = parse_timestamp(j.at("created_at").get<std::string>());
  job.updated_at = parse_timestamp(j.at("updated_at").get<std::string>());
  job.spec = get_optional<ContentSpec>(j, "spec");
  job.asset = get_optional<AssetMeta>(j, "asset");
  job.tutor_pack = get_optional<TutorPack>(j, "tutor_pack");
  job.preview_image_url = get_optional<std::string>(j, "preview_image_url");
  job.bundle_id = get_optional<std::string>(j, "bundle_id");
  return job;
}

}  // namespace xrauthor::pipeline

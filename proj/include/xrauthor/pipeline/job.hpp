#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xrauthor/common/time.hpp"
#include "xrauthor/common/types.hpp"

namespace xrauthor::pipeline {

enum class JobState {
  Received,
  Interpreting,
  AwaitingApproval,
  Generating,
  Reviewing,
  Revising,
  Enriching,
  Complete,
  Failed,
};

enum class FailureReason { TeacherRejected, SafetyExhausted, ProviderError };

enum class EventKind { StageEntered, StageCompleted, ProviderCall, Warning, Error };

std::string to_string(JobState s);
std::optional<JobState> parse_job_state(std::string_view s);
std::string to_string(FailureReason r);
std::optional<FailureReason> parse_failure_reason(std::string_view s);
std::string to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view s);

bool is_terminal(JobState s);

struct JobEvent {
  Timestamp timestamp{};
  JobState stage = JobState::Received;
  EventKind kind = EventKind::StageEntered;
  std::string detail;
  int attempt = 1;

  bool operator==(const JobEvent&) const = default;

  // The last event of every job: StageCompleted with stage Complete or Failed.
  bool is_terminal_event() const { return kind == EventKind::StageCompleted && is_terminal(stage); }
};

struct PipelineJob {
  std::string job_id;
  AuthoringRequest request;
  JobState state = JobState::Received;
  std::optional<FailureReason> failure_reason;
  std::string failure_detail;
  int attempt = 1;
  std::optional<ContentSpec> spec;
  std::optional<AssetMeta> asset;
  std::vector<SafetyVerdict> verdict_history;
  std::optional<TutorPack> tutor_pack;
  std::vector<JobEvent> events;
  Timestamp created_at{};
  Timestamp updated_at{};

  // generation_prompts[k - 1] is the prompt sent to the generator on attempt k.
  std::vector<std::string> generation_prompts;
  std::optional<std::string> preview_image_url;
  std::optional<std::string> bundle_id;

  // Store revision, checked on save.
  std::uint64_t version = 0;

  bool operator==(const PipelineJob&) const = default;
};

std::vector<std::string> problems(const PipelineJob& job);

void to_json(nlohmann::json& j, JobState s);
void from_json(const nlohmann::json& j, JobState& s);
void to_json(nlohmann::json& j, const JobEvent& e);
void from_json(const nlohmann::json& j, JobEvent& e);

// Everything except events, which the store keeps in a separate log.
nlohmann::json job_header_to_json(const PipelineJob& job);
PipelineJob job_header_from_json(const nlohmann::json& j);

}  // namespace xrauthor::pipeline

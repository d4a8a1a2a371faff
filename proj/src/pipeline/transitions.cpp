#include "xrauthor/pipeline/transitions.hpp"

namespace xrauthor::pipeline {

bool is_legal_transition(JobState from, JobState to, std::optional<FailureReason> reason) {
  using S = JobState;
  if (is_terminal(from)) return false;
  if (to == S::Failed) {
    if (!reason) return true;
    switch (*reason) {
      case FailureReason::TeacherRejected: return from == S::AwaitingApproval;
      case FailureReason::SafetyExhausted: return from == S::Reviewing;
      case FailureReason::ProviderError: return from != S::AwaitingApproval;
    }
    return false;
  }
  switch (from) {
    case S::Received: return to == S::Interpreting;
    case S::Interpreting: return to == S::AwaitingApproval || to == S::Generating;
    case S::AwaitingApproval: return to == S::Generating;
    case S::Generating: return to == S::Reviewing;
    case S::Reviewing: return to == S::Enriching || to == S::Revising;
    case S::Revising: return to == S::Generating;
    case S::Enriching: return to == S::Complete;
    default: return false;
  }
}

std::vector<StateStep> state_trace(const std::vector<JobEvent>& events) {
  std::vector<StateStep> trace;
  for (const auto& e : events) {
    if (e.kind == EventKind::StageEntered || e.is_terminal_event()) trace.push_back({e.stage, e.attempt});
  }
  return trace;
}

std::vector<std::string> trace_problems(const PipelineJob& job) {
  std::vector<std::string> out;
  const auto trace = state_trace(job.events);
  if (trace.empty() || trace.front().state != JobState::Received) {
    out.push_back("trace does not start at Received");
    return out;
  }
  size_t reviews_seen = 0;
  for (size_t i = 1; i < trace.size(); ++i) {
    const auto& prev = trace[i - 1];
    const auto& next = trace[i];
    const bool last = i + 1 == trace.size();
    const auto reason = next.state == JobState::Failed ? job.failure_reason : std::nullopt;
    const std::string edge = to_string(prev.state) + " -> " + to_string(next.state);
    if (!is_legal_transition(prev.state, next.state, reason)) out.push_back("illegal edge " + edge);
    if (next.state == JobState::Failed && !last) out.push_back("Failed is not the last state");

    if (prev.state == JobState::Interpreting) {
      const bool gated = next.state == JobState::AwaitingApproval;
      if (next.state != JobState::Failed && gated != job.request.require_approval) {
        out.push_back("approval gate disagrees with require_approval at " + edge);
      }
    }
    if (prev.state == JobState::Revising && next.state == JobState::Generating && next.attempt != prev.attempt + 1) {
      out.push_back("Revising -> Generating must increment attempt");
    }
    if (!(prev.state == JobState::Revising && next.state == JobState::Generating) && next.attempt != prev.attempt) {
      out.push_back("attempt changed outside Revising -> Generating at " + edge);
    }
    if (next.attempt > job.request.max_safety_attempts) out.push_back("attempt exceeds the budget at " + edge);

    if (prev.state == JobState::Reviewing && next.state != JobState::Failed) {
      if (reviews_seen >= job.verdict_history.size()) {
        out.push_back("review without a recorded verdict at " + edge);
      } else {
        const bool approved = job.verdict_history[reviews_seen].approved;
        if (approved != (next.state == JobState::Enriching)) out.push_back("verdict disagrees with " + edge);
        if (next.state == JobState::Revising && prev.attempt >= job.request.max_safety_attempts) {
          out.push_back("revision past the attempt budget");
        }
      }
    }
    if (prev.state == JobState::Reviewing && reason == FailureReason::SafetyExhausted &&
        prev.attempt != job.request.max_safety_attempts) {
      out.push_back("SafetyExhausted before the attempt budget was spent");
    }
    if (prev.state == JobState::Reviewing && !(next.state == JobState::Failed && reason == FailureReason::ProviderError)) {
      ++reviews_seen;
    }
  }
  if (reviews_seen != job.verdict_history.size()) out.push_back("verdict history does not match completed reviews");
  if (is_terminal(job.state) && trace.back().state != job.state) out.push_back("trace does not end at the job state");
  return out;
}

}  // namespace xrauthor::pipeline

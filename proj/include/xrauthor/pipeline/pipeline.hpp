#pragma once

#include <functional>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "xrauthor/agents/agents.hpp"
#include "xrauthor/agents/prompts.hpp"
#include "xrauthor/common/time.hpp"
#include "xrauthor/pipeline/job.hpp"
#include "xrauthor/pipeline/job_store.hpp"
#include "xrauthor/providers/chat.hpp"
#include "xrauthor/providers/generation.hpp"
#include "xrauthor/providers/polling.hpp"
#include "xrauthor/providers/search.hpp"

namespace xrauthor::pipeline {

// Non-owning; every pointer must be set.
struct StageDependencies {
  providers::ChatProvider* chat = nullptr;
  providers::GenerationProvider* generation = nullptr;
  providers::SearchProvider* search = nullptr;
  const agents::PromptSet* prompts = nullptr;
  JobStore* store = nullptr;
  Clock* clock = nullptr;
  providers::Waiter* waiter = nullptr;
  providers::PollOptions poll;
  agents::AgentOptions agent_options;
  std::stop_token stop;
  // Scrubbed from event details and failure messages.
  std::vector<std::string> secrets;
};

// Persists a new job in Received with one StageEntered event.
std::string submit(const AuthoringRequest& request, JobStore& store, Clock& clock, IdSource& ids);

// Runs the single stage implied by job.state, persists, and returns the job in
// its successor state. Provider failures, output that never validated and
// unusable assets end the job in Failed(ProviderError). Cancellation and
// storage errors propagate without touching the persisted job, which can then
// be reloaded and resumed.
PipelineJob run_stage(PipelineJob job, const StageDependencies& deps);

enum class ApprovalDecision { Approve, Reject };

std::optional<ApprovalDecision> parse_approval_decision(std::string_view s);

// Throws IllegalState unless the job awaits approval, ValidationError when an
// edited spec breaks ContentSpec invariants.
PipelineJob resolve_approval(PipelineJob job, ApprovalDecision decision, const std::optional<ContentSpec>& edited_spec,
                             JobStore& store, Clock& clock);

// Runs stages until the job is terminal or awaiting approval. `after_stage`
// sees every persisted snapshot.
PipelineJob run_until_blocked(const std::string& job_id, const StageDependencies& deps,
                              const std::function<void(const PipelineJob&)>& after_stage = {});

}  // namespace xrauthor::pipeline

#include "xrauthor/pipeline/pipeline.hpp"

#include <algorithm>

#include "xrauthor/bundle/bundle.hpp"
#include "xrauthor/bundle/glb.hpp"
#include "xrauthor/common/errors.hpp"
#include "xrauthor/common/text.hpp"
#include "xrauthor/pipeline/decisions.hpp"

namespace xrauthor::pipeline {

namespace {

// Appends events to a job and moves it along the state graph.
class Recorder {
 public:
  Recorder(PipelineJob& job, Clock& clock, const std::vector<std::string>& secrets)
      : job_(job), clock_(clock), secrets_(secrets) {}

  void event(EventKind kind, const std::string& detail) { append(job_.state, kind, detail); }

  void transition(JobState to, const std::string& detail = {}) {
    append(job_.state, EventKind::StageCompleted, is_terminal(to) ? std::string{} : detail);
    if (job_.state == JobState::Revising && to == JobState::Generating) ++job_.attempt;
    job_.state = to;
    if (is_terminal(to)) {
      append(to, EventKind::StageCompleted, detail);
    } else {
      append(to, EventKind::StageEntered, {});
    }
  }

  void fail(FailureReason reason, const std::string& detail) {
    const auto clean = text::redact(detail, secrets_);
    append(job_.state, EventKind::Error, clean);
    job_.state = JobState::Failed;
    job_.failure_reason = reason;
    job_.failure_detail = clean;
    append(JobState::Failed, EventKind::StageCompleted, "Failed(" + to_string(reason) + "): " + clean);
  }

 private:
  void append(JobState stage, EventKind kind, const std::string& detail) {
    auto now = clock_.now();
    if (!job_.events.empty()) now = std::max(now, job_.events.back().timestamp);
    job_.events.push_back(JobEvent{now, stage, kind, text::redact(detail, secrets_), job_.attempt});
    job_.updated_at = now;
  }

  PipelineJob& job_;
  Clock& clock_;
  const std::vector<std::string>& secrets_;
};

void check(const StageDependencies& deps) {
  if (!deps.chat || !deps.generation || !deps.search || !deps.prompts || !deps.store || !deps.clock || !deps.waiter) {
    throw InvalidArgument("stage dependencies are incomplete");
  }
}

const ContentSpec& spec_of(const PipelineJob& job) {
  if (!job.spec) throw IllegalState("job " + job.job_id + " has no content spec in state " + to_string(job.state));
  return *job.spec;
}

std::string failing_keys(const SafetyVerdict& verdict) {
  std::vector<std::string> keys;
  for (const auto* c : verdict.failing()) keys.push_back(to_string(c->key));
  return text::join(keys, ", ");
}

void interpret_stage(PipelineJob& job, Recorder& rec, const StageDependencies& deps) {
  rec.event(EventKind::ProviderCall, "chat " + deps.chat->name() + ": interpret request");
  job.spec = agents::interpret(job.request, *deps.chat, *deps.prompts, deps.agent_options);
  rec.transition(job.request.require_approval ? JobState::AwaitingApproval : JobState::Generating,
                 "core concept: " + job.spec->core_concept);
}

void generate_stage(PipelineJob& job, Recorder& rec, const StageDependencies& deps) {
  const auto& spec = spec_of(job);
  if (job.generation_prompts.size() < static_cast<size_t>(job.attempt)) job.generation_prompts.push_back(spec.refined_prompt);
  const auto& prompt = job.generation_prompts.at(static_cast<size_t>(job.attempt - 1));

  const auto task_id = deps.generation->start_generation(prompt);
  rec.event(EventKind::ProviderCall, "generation " + deps.generation->name() + ": started task " + task_id);
  const auto task = providers::poll_generation(*deps.generation, task_id, deps.poll, *deps.waiter, deps.stop);
  if (task.status == providers::TaskStatus::Failed) {
    throw ProviderError("generation task " + task_id + " failed: " + task.failure_reason);
  }
  const auto bytes = deps.generation->fetch_asset(*task.model_url);
  const auto meta = bundle::validate_glb(bytes, AssetSource::Generated);
  deps.store->put_asset(job.job_id, job.attempt, bytes);
  job.asset = meta;
  job.preview_image_url = task.preview_image_url;
  rec.event(EventKind::ProviderCall, "generation " + deps.generation->name() + ": task " + task_id + " succeeded, " +
                                         std::to_string(meta.byte_length) + " bytes, " +
                                         std::to_string(meta.mesh_count) + " mesh(es), " +
                                         std::to_string(meta.triangle_count) + " triangles");
  rec.transition(JobState::Reviewing);
}

void review_stage(PipelineJob& job, Recorder& rec, const StageDependencies& deps) {
  const auto& spec = spec_of(job);
  rec.event(EventKind::ProviderCall, "chat " + deps.chat->name() + ": safety review");
  auto verdict = agents::review(spec, job.generation_prompts.at(static_cast<size_t>(job.attempt - 1)),
                                job.preview_image_url, *deps.chat, *deps.prompts, deps.agent_options);
  const auto action = decide_after_review(verdict, job.attempt, job.request.max_safety_attempts);
  const std::string summary =
      verdict.approved ? "approved" : "rejected (" + failing_keys(verdict) + ")";
  job.verdict_history.push_back(std::move(verdict));
  switch (action) {
    case NextAction::Enrich: rec.transition(JobState::Enriching, summary); break;
    case NextAction::Regenerate: rec.transition(JobState::Revising, summary); break;
    case NextAction::Abort:
      rec.fail(FailureReason::SafetyExhausted, "safety review " + summary + " on all " +
                                                   std::to_string(job.request.max_safety_attempts) + " attempt(s)");
      break;
  }
}

void revise_stage(PipelineJob& job, Recorder& rec) {
  const auto& spec = spec_of(job);
  if (job.generation_prompts.size() < static_cast<size_t>(job.attempt + 1)) {
    job.generation_prompts.push_back(build_revision_prompt(spec, job.verdict_history));
  }
  rec.transition(JobState::Generating, "revised generation prompt for attempt " + std::to_string(job.attempt + 1));
}

void enrich_stage(PipelineJob& job, Recorder& rec, const StageDependencies& deps) {
  const auto& spec = spec_of(job);
  if (!job.asset) throw IllegalState("job " + job.job_id + " has no asset to enrich");
  auto outcome = agents::enrich(spec, *job.asset, *deps.search, *deps.chat, *deps.prompts, deps.agent_options);
  rec.event(EventKind::ProviderCall, "search " + deps.search->name() + ": \"" + outcome.search_query + "\" returned " +
                                         std::to_string(outcome.search_results.size()) + " result(s)");
  rec.event(EventKind::ProviderCall, "chat " + deps.chat->name() + ": tutor enrichment");
  for (const auto& w : outcome.warnings) rec.event(EventKind::Warning, w);

  bundle::BundleInputs inputs;
  inputs.bundle_id = job.job_id;
  inputs.request = job.request;
  inputs.spec = spec;
  inputs.verdicts = job.verdict_history;
  inputs.tutor_pack = outcome.pack;
  inputs.asset = job.asset;
  inputs.asset_bytes = deps.store->get_asset(job.job_id, job.attempt);
  inputs.created_at = deps.clock->now();
  bundle::write_bundle(deps.store->bundle_dir(job.job_id), inputs);

  job.tutor_pack = std::move(outcome.pack);
  job.bundle_id = job.job_id;
  rec.transition(JobState::Complete, "bundle " + job.job_id + " written");
}

}  // namespace

std::string submit(const AuthoringRequest& request, JobStore& store, Clock& clock, IdSource& ids) {
  validate(request);
  PipelineJob job;
  job.job_id = ids.next_id();
  job.request = request;
  job.created_at = clock.now();
  job.updated_at = job.created_at;
  job.events.push_back(JobEvent{job.created_at, JobState::Received, EventKind::StageEntered, "job submitted", 1});
  store.create(job);
  return job.job_id;
}

PipelineJob run_stage(PipelineJob job, const StageDependencies& deps) {
  check(deps);
  if (is_terminal(job.state) || job.state == JobState::AwaitingApproval) {
    throw IllegalState("no stage to run for job " + job.job_id + " in state " + to_string(job.state));
  }
  if (deps.stop.stop_requested()) throw Cancelled("job " + job.job_id + " cancelled before " + to_string(job.state));

  Recorder rec(job, *deps.clock, deps.secrets);
  const auto snapshot = job;
  auto fail_from_snapshot = [&](const std::string& detail) {
    // Drop half-applied changes but keep the provider calls already logged.
    std::vector<JobEvent> calls(job.events.begin() + static_cast<std::ptrdiff_t>(snapshot.events.size()),
                                job.events.end());
    job = snapshot;
    job.events.insert(job.events.end(), calls.begin(), calls.end());
    rec.fail(FailureReason::ProviderError, detail);
  };

  try {
    switch (job.state) {
      case JobState::Received: rec.transition(JobState::Interpreting); break;
      case JobState::Interpreting: interpret_stage(job, rec, deps); break;
      case JobState::Generating: generate_stage(job, rec, deps); break;
      case JobState::Reviewing: review_stage(job, rec, deps); break;
      case JobState::Revising: revise_stage(job, rec); break;
      case JobState::Enriching: enrich_stage(job, rec, deps); break;
      default: throw IllegalState("unexpected state " + to_string(job.state));
    }
  } catch (const Cancelled&) {
    throw;
  } catch (const ProviderError& e) {
    fail_from_snapshot(e.kind() + ": " + e.what());
  } catch (const MalformedOutput& e) {
    fail_from_snapshot(e.kind() + ": " + e.what() + " [" + text::join(e.problems(), "; ") + "]");
  } catch (const bundle::GlbError& e) {
    fail_from_snapshot("invalid asset (" + e.kind() + "): " + e.what());
  }
  deps.store->save(job);
  return job;
}

std::optional<ApprovalDecision> parse_approval_decision(std::string_view s) {
  if (s == "approve") return ApprovalDecision::Approve;
  if (s == "reject") return ApprovalDecision::Reject;
  return std::nullopt;
}

PipelineJob resolve_approval(PipelineJob job, ApprovalDecision decision, const std::optional<ContentSpec>& edited_spec,
                             JobStore& store, Clock& clock) {
  if (job.state != JobState::AwaitingApproval) {
    throw IllegalState("job " + job.job_id + " is not awaiting approval (state " + to_string(job.state) + ")");
  }
  static const std::vector<std::string> no_secrets;
  Recorder rec(job, clock, no_secrets);
  if (decision == ApprovalDecision::Reject) {
    rec.fail(FailureReason::TeacherRejected, "the teacher rejected the interpretation");
  } else {
    if (edited_spec) {
      if (auto p = problems(*edited_spec); !p.empty()) {
        throw ValidationError("edited_spec", text::join(p, "; "));
      }
      job.spec = *edited_spec;
    }
    rec.transition(JobState::Generating, edited_spec ? "approved with teacher edits" : "approved");
  }
  store.save(job);
  return job;
}

PipelineJob run_until_blocked(const std::string& job_id, const StageDependencies& deps,
                              const std::function<void(const PipelineJob&)>& after_stage) {
  check(deps);
  auto job = deps.store->load(job_id);
  while (!is_terminal(job.state) && job.state != JobState::AwaitingApproval) {
    job = run_stage(std::move(job), deps);
    if (after_stage) after_stage(job);
  }
  return job;
}

}  // namespace xrauthor::pipeline

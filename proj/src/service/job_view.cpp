#include "xrauthor/service/job_view.hpp"

namespace xrauthor::service {

using nlohmann::json;

std::string bundle_url(const std::string& job_id) { return "/api/bundles/" + job_id; }

json job_view(const pipeline::PipelineJob& job, size_t events_tail) {
  json view{{"job_id", job.job_id},
            {"state", job.state},
            {"attempt", job.attempt},
            {"max_safety_attempts", job.request.max_safety_attempts},
            {"request", job.request},
            {"verdicts", job.verdict_history},
            {"generation_prompts", job.generation_prompts},
            {"created_at", format_timestamp(job.created_at)},
            {"updated_at", format_timestamp(job.updated_at)},
            {"event_count", job.events.size()}};
  view["failure_reason"] = job.failure_reason ? json(pipeline::to_string(*job.failure_reason)) : json(nullptr);
  view["failure_detail"] = job.failure_reason ? json(job.failure_detail) : json(nullptr);
  view["spec"] = job.spec ? json(*job.spec) : json(nullptr);
  view["asset"] = job.asset ? json(*job.asset) : json(nullptr);
  view["latest_verdict"] = job.verdict_history.empty() ? json(nullptr) : json(job.verdict_history.back());
  view["tutor_pack"] = job.tutor_pack ? json(*job.tutor_pack) : json(nullptr);
  if (job.state == pipeline::JobState::Complete) {
    const auto base = bundle_url(job.job_id);
    view["bundle_url"] = base;
    view["bundle_files"] = {{"manifest", base + "/manifest.json"},
                            {"model", base + "/model.glb"},
                            {"tutor", base + "/tutor.json"}};
  } else {
    view["bundle_url"] = nullptr;
  }
  const size_t first = job.events.size() > events_tail ? job.events.size() - events_tail : 0;
  view["events_offset"] = first;
  view["events"] = json::array();
  for (size_t i = first; i < job.events.size(); ++i) view["events"].push_back(job.events[i]);
  return view;
}

}  // namespace xrauthor::service

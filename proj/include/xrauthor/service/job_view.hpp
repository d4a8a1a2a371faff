#pragma once

#include <cstddef>
#include <string>

#include <nlohmann/json.hpp>

#include "xrauthor/pipeline/job.hpp"

namespace xrauthor::service {

inline constexpr size_t kDefaultEventsTail = 50;

std::string bundle_url(const std::string& job_id);

// Client snapshot of a job. bundle_url is present exactly when the job is
// Complete; events holds the last `events_tail` entries, event_count the total.
nlohmann::json job_view(const pipeline::PipelineJob& job, size_t events_tail = kDefaultEventsTail);

}  // namespace xrauthor::service

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xrauthor/pipeline/job.hpp"

namespace xrauthor::pipeline {

// Structural legality of one edge of the job state graph. Guards that depend
// on the request (approval flag, attempt budget) are checked by trace_problems.
bool is_legal_transition(JobState from, JobState to, std::optional<FailureReason> reason = std::nullopt);

// The sequence of states a job has entered, read back from its event log.
struct StateStep {
  JobState state;
  int attempt;
};
std::vector<StateStep> state_trace(const std::vector<JobEvent>& events);

// Every way in which the job's recorded path departs from the graph,
// including the guard conditions. Empty for a legal history.
std::vector<std::string> trace_problems(const PipelineJob& job);

}  // namespace xrauthor::pipeline

#include <doctest.h>

#include <set>

#include "support.hpp"
#include "xrauthor/pipeline/job.hpp"
#include "xrauthor/pipeline/transitions.hpp"

using namespace xrauthor;
using namespace xrauthor::pipeline;
using S = JobState;

namespace {

const std::vector<S> kStates = {S::Received, S::Interpreting, S::AwaitingApproval, S::Generating, S::Reviewing,
                                S::Revising, S::Enriching,    S::Complete,         S::Failed};

}  // namespace

TEST_CASE("the transition table, edge by edge") {
  // Non-failure edges, written out independently of the implementation.
  const std::set<std::pair<S, S>> legal = {
      {S::Received, S::Interpreting},  {S::Interpreting, S::AwaitingApproval}, {S::Interpreting, S::Generating},
      {S::AwaitingApproval, S::Generating}, {S::Generating, S::Reviewing},     {S::Reviewing, S::Enriching},
      {S::Reviewing, S::Revising},     {S::Revising, S::Generating},           {S::Enriching, S::Complete}};
  for (auto from : kStates) {
    for (auto to : kStates) {
      if (to == S::Failed) continue;
      CAPTURE(to_string(from));
      CAPTURE(to_string(to));
      CHECK(is_legal_transition(from, to) == (legal.count({from, to}) == 1));
    }
  }
}

TEST_CASE("failure edges depend on the reason") {
  CHECK(is_legal_transition(S::AwaitingApproval, S::Failed, FailureReason::TeacherRejected));
  CHECK_FALSE(is_legal_transition(S::Reviewing, S::Failed, FailureReason::TeacherRejected));
  CHECK(is_legal_transition(S::Reviewing, S::Failed, FailureReason::SafetyExhausted));
  CHECK_FALSE(is_legal_transition(S::Generating, S::Failed, FailureReason::SafetyExhausted));
  for (auto from : {S::Received, S::Interpreting, S::Generating, S::Reviewing, S::Revising, S::Enriching}) {
    CHECK(is_legal_transition(from, S::Failed, FailureReason::ProviderError));
  }
  CHECK_FALSE(is_legal_transition(S::Complete, S::Failed, FailureReason::ProviderError));
  CHECK_FALSE(is_legal_transition(S::Failed, S::Failed, FailureReason::ProviderError));
}

TEST_CASE("terminal states have no successors") {
  for (auto to : kStates) {
    CHECK_FALSE(is_legal_transition(S::Complete, to));
    CHECK_FALSE(is_legal_transition(S::Failed, to));
  }
  CHECK(is_terminal(S::Complete));
  CHECK(is_terminal(S::Failed));
  CHECK_FALSE(is_terminal(S::AwaitingApproval));
}

TEST_CASE("state and reason names round trip") {
  for (auto s : kStates) CHECK(parse_job_state(to_string(s)) == s);
  for (auto r : {FailureReason::TeacherRejected, FailureReason::SafetyExhausted, FailureReason::ProviderError}) {
    CHECK(parse_failure_reason(to_string(r)) == r);
  }
  CHECK_FALSE(parse_job_state("Done"));
}

TEST_CASE("trace_problems flags hand-built bad histories") {
  PipelineJob job;
  job.request = testing::heart_request(false, 2);
  auto at = [&](S s, int attempt = 1, EventKind k = EventKind::StageEntered) {
    job.events.push_back(JobEvent{{}, s, k, "", attempt});
  };
  at(S::Received);
  at(S::Interpreting);
  CHECK(trace_problems(job).empty());

  SUBCASE("skipping the review") {
    at(S::Generating);
    at(S::Enriching);
    CHECK_FALSE(trace_problems(job).empty());
  }
  SUBCASE("approval gate taken without require_approval") {
    at(S::AwaitingApproval);
    CHECK_FALSE(trace_problems(job).empty());
  }
  SUBCASE("attempt not incremented on regeneration") {
    at(S::Generating);
    at(S::Reviewing);
    at(S::Revising);
    at(S::Generating, 1);
    job.verdict_history.push_back(testing::Gen(1).verdict(false));
    CHECK_FALSE(trace_problems(job).empty());
  }
  SUBCASE("verdict disagreeing with the branch taken") {
    at(S::Generating);
    at(S::Reviewing);
    at(S::Enriching);
    job.verdict_history.push_back(testing::Gen(1).verdict(false));
    CHECK_FALSE(trace_problems(job).empty());
  }
  SUBCASE("safety exhausted early") {
    at(S::Generating);
    at(S::Reviewing);
    at(S::Failed, 1, EventKind::StageCompleted);
    job.state = S::Failed;
    job.failure_reason = FailureReason::SafetyExhausted;
    job.verdict_history.push_back(testing::Gen(1).verdict(false));
    CHECK_FALSE(trace_problems(job).empty());
  }
  SUBCASE("a legal two-attempt path") {
    at(S::Generating);
    at(S::Reviewing);
    at(S::Revising);
    at(S::Generating, 2);
    at(S::Reviewing, 2);
    at(S::Enriching, 2);
    at(S::Complete, 2, EventKind::StageCompleted);
    job.state = S::Complete;
    job.verdict_history = {testing::Gen(1).verdict(false), testing::Gen(2).verdict(true)};
    CHECK(trace_problems(job).empty());
  }
}

TEST_CASE("randomized scripted runs only walk legal paths") {
  testing::Gen gen(61);
  std::set<std::string> endings;
  for (int i = 0; i < 150; ++i) {
    const auto job = testing::random_scripted_run(gen);
    CAPTURE(job.job_id);
    CHECK(is_terminal(job.state));
    CHECK(trace_problems(job).empty());
    CHECK(problems(job).empty());
    CHECK(job.events.back().is_terminal_event());
    endings.insert(to_string(job.state) + (job.failure_reason ? "/" + to_string(*job.failure_reason) : ""));
  }
  // The generator reaches every kind of ending.
  CHECK(endings == std::set<std::string>{"Complete", "Failed/ProviderError", "Failed/SafetyExhausted",
                                         "Failed/TeacherRejected"});
}

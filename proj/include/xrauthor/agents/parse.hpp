#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xrauthor/common/types.hpp"

namespace xrauthor::agents {

// Outcome of turning model JSON into a domain record. Exactly one of `value`
// or a non-empty `problems` is set; `problems` feed the repair prompt.
template <class T>
struct Parsed {
  std::optional<T> value;
  std::vector<std::string> problems;
  std::vector<std::string> warnings;
};

Parsed<ContentSpec> parse_content_spec(const nlohmann::json& j, GradeBand grade_band);

// Accepts "criteria" either as an array of {key, pass, rationale, feedback}
// or as an object keyed by criterion name. "approved", when given, must agree
// with the criteria. Revision feedback on an approved verdict is dropped.
Parsed<SafetyVerdict> parse_safety_verdict(const nlohmann::json& j, ReviewedInputs inputs);

// Readings whose url is not in `grounding_urls` are dropped with a warning.
Parsed<TutorPack> parse_tutor_pack(const nlohmann::json& j, const std::set<std::string>& grounding_urls);

}  // namespace xrauthor::agents

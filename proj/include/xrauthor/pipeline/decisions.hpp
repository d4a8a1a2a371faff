#pragma once

#include <span>
#include <string>

#include "xrauthor/common/types.hpp"

namespace xrauthor::pipeline {

enum class NextAction { Enrich, Regenerate, Abort };

std::string to_string(NextAction a);

// Pure. Throws InvalidArgument unless 1 <= attempt <= max_attempts.
NextAction decide_after_review(const SafetyVerdict& verdict, int attempt, int max_attempts);

// Generation prompt for the next attempt. Correction clauses come first, most
// recent review first, so that a length-limited generator keeps them; then the
// refined prompt and the required visual features verbatim. Each clause uses
// the criterion's feedback, or its rationale when the reviewer left none.
// Throws InvalidArgument if the last verdict is approved or history is empty.
std::string build_revision_prompt(const ContentSpec& spec, std::span<const SafetyVerdict> history);
std::string build_revision_prompt(const ContentSpec& spec, const SafetyVerdict& verdict);

// The clause emitted for one failing criterion, e.g. "No bias: show diverse hands".
std::string correction_clause(const CriterionResult& failing);

}  // namespace xrauthor::pipeline

#include "xrauthor/pipeline/decisions.hpp"

#include <sstream>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/common/text.hpp"

namespace xrauthor::pipeline {

std::string to_string(NextAction a) {
  switch (a) {
    case NextAction::Enrich: return "Enrich";
    case NextAction::Regenerate: return "Regenerate";
    case NextAction::Abort: return "Abort";
  }
  return "?";
}

NextAction decide_after_review(const SafetyVerdict& verdict, int attempt, int max_attempts) {
  if (attempt < 1 || attempt > max_attempts) {
    throw InvalidArgument("attempt " + std::to_string(attempt) + " outside 1.." + std::to_string(max_attempts));
  }
  if (verdict.approved) return NextAction::Enrich;
  return attempt < max_attempts ? NextAction::Regenerate : NextAction::Abort;
}

std::string correction_clause(const CriterionResult& failing) {
  const std::string& text = failing.feedback.empty() ? failing.rationale : failing.feedback;
  return criterion_label(failing.key) + ": " + text::trim(text);
}

std::string build_revision_prompt(const ContentSpec& spec, std::span<const SafetyVerdict> history) {
  if (history.empty()) throw InvalidArgument("revision needs at least one verdict");
  if (history.back().approved) throw InvalidArgument("revision needs a rejected verdict");

  std::ostringstream out;
  for (size_t i = history.size(); i-- > 0;) {
    const auto& verdict = history[i];
    if (verdict.approved) continue;
    out << "Corrections from review " << i + 1 << ":\n";
    std::vector<std::string> clauses;
    for (const auto* c : verdict.failing()) {
      clauses.push_back(correction_clause(*c));
      out << "- " << clauses.back() << "\n";
    }
    const auto overall = text::trim(verdict.revision_feedback);
    bool repeated = false;
    for (const auto& c : clauses) repeated = repeated || c.find(overall) != std::string::npos;
    if (!overall.empty() && !repeated) out << "- Overall: " << overall << "\n";
  }
  out << "\n" << spec.refined_prompt << "\n\n"
      << "Required visual features: " << text::join(spec.required_visual_features, "; ") << ".";
  return out.str();
}

std::string build_revision_prompt(const ContentSpec& spec, const SafetyVerdict& verdict) {
  return build_revision_prompt(spec, std::span<const SafetyVerdict>(&verdict, 1));
}

}  // namespace xrauthor::pipeline

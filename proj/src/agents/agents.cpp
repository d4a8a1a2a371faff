#include "xrauthor/agents/agents.hpp"

#include <functional>
#include <set>
#include <sstream>

#include "xrauthor/agents/extract.hpp"
#include "xrauthor/agents/parse.hpp"
#include "xrauthor/common/errors.hpp"

namespace xrauthor::agents {

using providers::ChatMessage;
using providers::ChatProvider;
using providers::ChatRequest;
using providers::Role;

namespace {

template <class T>
struct Structured {
  T value;
  std::vector<std::string> warnings;
};

// Sends `request`, parsing each reply; invalid replies are answered with the
// validator's complaints until the repair budget is spent.
template <class T>
Structured<T> ask_structured(ChatProvider& chat, ChatRequest request, int repair_rounds, const std::string& agent,
                             const std::function<Parsed<T>(const nlohmann::json&)>& parse) {
  std::vector<std::string> problems;
  for (int round = 0; round <= repair_rounds; ++round) {
    const auto reply = chat.chat(request);
    Parsed<T> parsed;
    try {
      parsed = parse(extract_structured(reply.text));
    } catch (const NoJsonFound&) {
      parsed.problems = {"the reply did not contain a JSON object"};
    }
    if (parsed.value) return Structured<T>{std::move(*parsed.value), std::move(parsed.warnings)};
    problems = std::move(parsed.problems);

    std::ostringstream repair;
    repair << "Your previous reply could not be used because it failed validation:\n";
    for (const auto& p : problems) repair << "- " << p << "\n";
    repair << "Reply again with only the corrected JSON object.";
    request.messages.push_back(ChatMessage{Role::Assistant, reply.text, std::nullopt});
    request.messages.push_back(ChatMessage{Role::User, repair.str(), std::nullopt});
  }
  throw MalformedOutput(agent + " output failed validation after " + std::to_string(repair_rounds + 1) + " replies",
                        problems);
}

void bullet_list(std::ostringstream& out, const std::vector<std::string>& items) {
  if (items.empty()) out << "- (none)\n";
  for (const auto& item : items) out << "- " << item << "\n";
}

std::string or_unspecified(const std::string& s) { return s.empty() ? "not specified" : s; }

}  // namespace

std::string interpret_message(const AuthoringRequest& request) {
  std::ostringstream out;
  out << "Teacher request: " << request.prompt_text << "\n"
      << "Grade band: " << to_string(request.grade_band) << "\n"
      << "Subject: " << or_unspecified(request.subject) << "\n"
      << "Topic: " << or_unspecified(request.topic);
  return out.str();
}

std::string review_message(const ContentSpec& spec, const std::string& generation_prompt, bool image_attached) {
  std::ostringstream out;
  out << "Evaluate the following generated educational content for a grade " << to_string(spec.grade_band)
      << " classroom.\n\n"
      << "Core concept: " << spec.core_concept << "\n"
      << "Learning objectives:\n";
  bullet_list(out, spec.learning_objectives);
  out << "Required visual features:\n";
  bullet_list(out, spec.required_visual_features);
  out << "Complexity notes: " << or_unspecified(spec.complexity_notes) << "\n"
      << "Labeling requirements:\n";
  bullet_list(out, spec.labeling_requirements);
  out << "Generation prompt sent to the 3D generator:\n" << generation_prompt << "\n\n";
  if (image_attached) {
    out << "A rendered preview image of the generated model is attached.";
  } else {
    out << "No rendered image is available; judge the textual specification and generation prompt only.";
  }
  return out.str();
}

std::string enrich_message(const ContentSpec& spec, const AssetMeta& asset,
                           const std::vector<providers::SearchResult>& results) {
  std::ostringstream out;
  const auto& box = asset.bounding_box;
  out << "3D model: " << spec.core_concept << " (grade " << to_string(spec.grade_band) << ")\n"
      << "Learning objectives:\n";
  bullet_list(out, spec.learning_objectives);
  out << "Visual features present in the model:\n";
  bullet_list(out, spec.required_visual_features);
  out << "Labeling requirements (use as annotation hints):\n";
  bullet_list(out, spec.labeling_requirements);
  out << "Model geometry: " << asset.mesh_count << " mesh(es), " << asset.triangle_count << " triangles, bounding box min ("
      << box.min.x << ", " << box.min.y << ", " << box.min.z << ") max (" << box.max.x << ", " << box.max.y << ", "
      << box.max.z << ")\n\n";
  if (results.empty()) {
    out << "No web search results are available; return an empty readings list.";
  } else {
    out << "Web search results:\n";
    for (size_t i = 0; i < results.size(); ++i) {
      out << "[" << i + 1 << "] " << results[i].title << "\nURL: " << results[i].url << "\n" << results[i].snippet
          << "\n";
    }
  }
  return out.str();
}

std::string search_query(const ContentSpec& spec) {
  return spec.core_concept + " grade " + to_string(spec.grade_band);
}

ContentSpec interpret(const AuthoringRequest& request, ChatProvider& chat, const PromptSet& prompts,
                      const AgentOptions& options) {
  validate(request);
  ChatRequest chat_request{prompts.pedagogical.system,
                           prompts.pedagogical.output_contract,
                           {ChatMessage{Role::User, interpret_message(request), std::nullopt}},
                           options.params};
  const auto band = request.grade_band;
  return ask_structured<ContentSpec>(chat, std::move(chat_request), options.repair_rounds, "pedagogical",
                                     [band](const nlohmann::json& j) { return parse_content_spec(j, band); })
      .value;
}

SafetyVerdict review(const ContentSpec& spec, const std::string& generation_prompt,
                     const std::optional<std::string>& preview_image_url, ChatProvider& chat,
                     const PromptSet& prompts, const AgentOptions& options) {
  if (auto p = problems(spec); !p.empty()) throw InvalidArgument("review needs a valid spec: " + p.front());
  const bool with_image = preview_image_url.has_value() && chat.supports_images();
  const auto inputs = with_image ? ReviewedInputs::TextAndImage : ReviewedInputs::TextOnly;
  ChatMessage message{Role::User, review_message(spec, generation_prompt, with_image), std::nullopt};
  if (with_image) message.image_ref = *preview_image_url;
  ChatRequest chat_request{prompts.safeguard.system, prompts.safeguard.output_contract, {message}, options.params};
  return ask_structured<SafetyVerdict>(chat, std::move(chat_request), options.repair_rounds, "safeguard",
                                       [inputs](const nlohmann::json& j) { return parse_safety_verdict(j, inputs); })
      .value;
}

EnrichOutcome enrich(const ContentSpec& spec, const AssetMeta& asset, providers::SearchProvider& search,
                     ChatProvider& chat, const PromptSet& prompts, const AgentOptions& options) {
  if (auto p = problems(spec); !p.empty()) throw InvalidArgument("enrich needs a valid spec: " + p.front());
  if (auto p = problems(asset); !p.empty()) throw InvalidArgument("enrich needs a valid asset: " + p.front());

  EnrichOutcome outcome;
  outcome.search_query = search_query(spec);
  try {
    outcome.search_results = search.search(outcome.search_query, options.search_k);
  } catch (const ProviderError& e) {
    outcome.warnings.push_back(std::string("web search failed, continuing without readings: ") + e.what());
    outcome.search_results.clear();
  }

  std::set<std::string> grounding;
  for (const auto& r : outcome.search_results) grounding.insert(r.url);

  ChatRequest chat_request{prompts.tutor.system,
                           prompts.tutor.output_contract,
                           {ChatMessage{Role::User, enrich_message(spec, asset, outcome.search_results), std::nullopt}},
                           options.params};
  auto result = ask_structured<TutorPack>(
      chat, std::move(chat_request), options.repair_rounds, "tutor",
      [&grounding](const nlohmann::json& j) { return parse_tutor_pack(j, grounding); });
  outcome.pack = std::move(result.value);
  outcome.warnings.insert(outcome.warnings.end(), result.warnings.begin(), result.warnings.end());
  return outcome;
}

}  // namespace xrauthor::agents

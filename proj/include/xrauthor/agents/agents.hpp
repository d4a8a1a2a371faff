#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xrauthor/agents/prompts.hpp"
#include "xrauthor/common/types.hpp"
#include "xrauthor/providers/chat.hpp"
#include "xrauthor/providers/search.hpp"

namespace xrauthor::agents {

struct AgentOptions {
  // Re-prompts carrying validator messages after the first reply.
  int repair_rounds = 2;
  providers::ChatParams params;
  int search_k = 5;
};

// Pedagogical agent: teacher request -> ContentSpec.
ContentSpec interpret(const AuthoringRequest& request, providers::ChatProvider& chat, const PromptSet& prompts,
                      const AgentOptions& options = {});

// Safeguard agent. The preview image is attached only when the provider
// accepts images; reviewed_inputs records which case applied.
SafetyVerdict review(const ContentSpec& spec, const std::string& generation_prompt,
                     const std::optional<std::string>& preview_image_url, providers::ChatProvider& chat,
                     const PromptSet& prompts, const AgentOptions& options = {});

struct EnrichOutcome {
  TutorPack pack;
  std::string search_query;
  std::vector<providers::SearchResult> search_results;
  std::vector<std::string> warnings;
};

// Tutor agent: one web search, then a grounded synthesis. A failing search
// degrades to no readings plus a warning.
EnrichOutcome enrich(const ContentSpec& spec, const AssetMeta& asset, providers::SearchProvider& search,
                     providers::ChatProvider& chat, const PromptSet& prompts, const AgentOptions& options = {});

// Request construction, exposed for fixtures and golden tests.
std::string interpret_message(const AuthoringRequest& request);
std::string review_message(const ContentSpec& spec, const std::string& generation_prompt, bool image_attached);
std::string enrich_message(const ContentSpec& spec, const AssetMeta& asset,
                           const std::vector<providers::SearchResult>& results);
std::string search_query(const ContentSpec& spec);

}  // namespace xrauthor::agents

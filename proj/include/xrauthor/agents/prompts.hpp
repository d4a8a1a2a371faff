#pragma once

#include <filesystem>
#include <string>

namespace xrauthor::agents {

struct AgentPrompt {
  std::string system;           // prompts/<agent>.txt, byte for byte
  std::string output_contract;  // prompts/<agent>.output.txt
};

struct PromptSet {
  AgentPrompt pedagogical;
  AgentPrompt safeguard;
  AgentPrompt tutor;

  // Throws InvalidArgument when a file is missing or empty.
  static PromptSet load(const std::filesystem::path& dir);
};

std::filesystem::path default_prompts_dir();

}  // namespace xrauthor::agents

#include "xrauthor/agents/prompts.hpp"

#include <fstream>
#include <iterator>

#include "xrauthor/common/errors.hpp"

namespace xrauthor::agents {

namespace {

std::string read_prompt(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("prompt file not found: " + path.string());
  std::string text(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>{});
  if (text.empty()) throw InvalidArgument("prompt file is empty: " + path.string());
  return text;
}

AgentPrompt load_agent(const std::filesystem::path& dir, const std::string& name) {
  return AgentPrompt{read_prompt(dir / (name + ".txt")), read_prompt(dir / (name + ".output.txt"))};
}

}  // namespace

PromptSet PromptSet::load(const std::filesystem::path& dir) {
  return PromptSet{load_agent(dir, "pedagogical"), load_agent(dir, "safeguard"), load_agent(dir, "tutor")};
}

std::filesystem::path default_prompts_dir() { return XRAUTHOR_DEFAULT_PROMPTS_DIR; }

}  // namespace xrauthor::agents

#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

namespace xrauthor::agents {

// Returns the first JSON object embedded in `raw`, tolerating surrounding
// prose and ```json fences. Candidates are tried in order of their opening
// brace; the first balanced span that parses as an object wins.
// Throws NoJsonFound when there is none.
nlohmann::json extract_structured(std::string_view raw);

}  // namespace xrauthor::agents

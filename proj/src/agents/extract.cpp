#include "xrauthor/agents/extract.hpp"

#include <optional>

#include "xrauthor/common/errors.hpp"

namespace xrauthor::agents {

namespace {

// End (exclusive) of the balanced object starting at `open`, honoring strings.
std::optional<size_t> balanced_end(std::string_view s, size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

}  // namespace

nlohmann::json extract_structured(std::string_view raw) {
  for (size_t open = raw.find('{'); open != std::string_view::npos; open = raw.find('{', open + 1)) {
    const auto end = balanced_end(raw, open);
    if (!end) continue;
    auto value = nlohmann::json::parse(raw.begin() + static_cast<std::ptrdiff_t>(open),
                                       raw.begin() + static_cast<std::ptrdiff_t>(*end), nullptr,
                                       /*allow_exceptions=*/false);
    if (!value.is_discarded() && value.is_object()) return value;
  }
  throw NoJsonFound("no JSON object found in model output");
}

}  // namespace xrauthor::agents

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace xrauthor::text {

std::string trim(std::string_view s);

// ASCII case folding; non-ASCII bytes pass through untouched.
std::string fold_case(std::string_view s);

bool contains_folded(std::string_view haystack, std::string_view needle);

// Scheme followed by "://" and a non-empty host.
bool is_well_formed_url(std::string_view url);

// Lowercase, runs of non-alphanumerics collapsed to '-', no leading/trailing '-'.
std::string slugify(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Replaces every occurrence of each non-empty secret with "[REDACTED]".
std::string redact(std::string s, const std::vector<std::string>& secrets);

}  // namespace xrauthor::text

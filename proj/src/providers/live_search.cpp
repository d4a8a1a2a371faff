#include <nlohmann/json.hpp>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/providers/live.hpp"

namespace xrauthor::providers {

using nlohmann::json;

TavilySearchProvider::TavilySearchProvider(std::string api_key, std::string base_url, LiveOptions options)
    : api_key_(std::move(api_key)),
      options_(std::move(options)),
      http_(std::move(base_url), options_.timeout, options_.max_in_flight) {}

std::vector<SearchResult> TavilySearchProvider::do_search(const std::string& query, int k) {
  const json body{{"query", query}, {"max_results", k}, {"search_depth", "basic"}};
  const HttpHeaders headers{{"Authorization", "Bearer " + api_key_}};
  const auto response = with_retries(options_.retry, options_.sleeper, [&] {
    auto r = http_.post_json("/search", body.dump(), headers);
    if (r.status < 200 || r.status >= 300) throw_for_status(r, "search");
    return r;
  });

  std::vector<SearchResult> out;
  try {
    const auto j = json::parse(response.body);
    for (const auto& r : j.at("results")) {
      out.push_back(SearchResult{r.value("title", std::string{}), r.value("url", std::string{}),
                                 r.value("content", std::string{}), r.value("score", 0.0)});
    }
  } catch (const json::exception& e) {
    throw SearchError(std::string("search: unexpected response shape: ") + e.what());
  }
  return out;
}

}  // namespace xrauthor::providers

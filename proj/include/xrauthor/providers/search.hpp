#pragma once

#include <string>
#include <vector>

namespace xrauthor::providers {

struct SearchResult {
  std::string title;
  std::string url;
  std::string snippet;
  double score = 0.0;  // [0,1]

  bool operator==(const SearchResult&) const = default;
};

class SearchProvider {
 public:
  virtual ~SearchProvider() = default;

  // At most k results, ordered by non-increasing score. Results with a
  // malformed url are dropped. Throws InvalidArgument on an empty query or k < 1.
  std::vector<SearchResult> search(const std::string& query, int k);

  virtual std::string name() const = 0;

 protected:
  virtual std::vector<SearchResult> do_search(const std::string& query, int k) = 0;
};

}  // namespace xrauthor::providers

#include "xrauthor/providers/http_transport.hpp"

#include <httplib.h>

#include <regex>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/common/text.hpp"

namespace xrauthor::providers {

std::optional<std::string> HttpResponse::header(const std::string& name) const {
  const auto folded = text::fold_case(name);
  for (const auto& [k, v] : headers) {
    if (text::fold_case(k) == folded) return v;
  }
  return std::nullopt;
}

UrlParts split_url(const std::string& url) {
  static const std::regex pattern(R"(^([A-Za-z][A-Za-z0-9+.\-]*://[^/?#\s]+)([^\s]*)$)");
  std::smatch m;
  if (!std::regex_match(url, m, pattern)) throw InvalidArgument("malformed url: " + url);
  UrlParts parts{m[1].str(), m[2].str()};
  while (!parts.path.empty() && parts.path.back() == '/') parts.path.pop_back();
  return parts;
}

ConcurrencyLimiter::ConcurrencyLimiter(int max_in_flight) : sem_(std::max(1, max_in_flight)) {}

ConcurrencyLimiter::Permit ConcurrencyLimiter::acquire() {
  sem_.acquire();
  return Permit(*this);
}

HttpTransport::HttpTransport(std::string base_url, std::chrono::seconds timeout, int max_in_flight)
    : base_url_(std::move(base_url)), base_(split_url(base_url_)), timeout_(timeout), limiter_(max_in_flight) {}

HttpResponse HttpTransport::post_json(const std::string& path, const std::string& body, const HttpHeaders& headers) {
  return send(base_.origin, "POST", base_.path + path, body, headers);
}

HttpResponse HttpTransport::get(const std::string& path, const HttpHeaders& headers) {
  return send(base_.origin, "GET", base_.path + path, {}, headers);
}

HttpResponse HttpTransport::get_url(const std::string& url, const HttpHeaders& headers) {
  const auto parts = split_url(url);
  return send(parts.origin, "GET", parts.path.empty() ? "/" : parts.path, {}, headers);
}

HttpResponse HttpTransport::send(const std::string& origin, const std::string& method, const std::string& path,
                                 const std::string& body, const HttpHeaders& headers) {
  auto permit = limiter_.acquire();
  httplib::Client client(origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  client.set_follow_location(true);

  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);

  httplib::Result result = method == "POST" ? client.Post(path, h, body, "application/json") : client.Get(path, h);
  if (!result) {
    const auto err = result.error();
    const auto what = origin + path.substr(0, path.find('?')) + ": " + httplib::to_string(err);
    if (err == httplib::Error::ConnectionTimeout) throw TimeoutError("request timed out: " + what);
    throw NetworkError("request failed: " + what, err == httplib::Error::Connection || err == httplib::Error::Read);
  }

  HttpResponse response;
  response.status = result->status;
  response.body = result->body;
  for (const auto& [k, v] : result->headers) response.headers.emplace_back(k, v);
  return response;
}

void throw_for_status(const HttpResponse& response, const std::string& context) {
  std::string detail = context + ": HTTP " + std::to_string(response.status);
  if (!response.body.empty()) detail += ": " + response.body.substr(0, 300);
  switch (response.status) {
    case 401:
    case 403: throw AuthError(detail);
    case 402: throw QuotaExceeded(detail);
    case 404: throw NotFound(detail);
    case 408: throw TimeoutError(detail);
    case 429:
      // Exhausted billing quota is not worth retrying.
      if (text::contains_folded(response.body, "quota") || text::contains_folded(response.body, "credit")) {
        throw QuotaExceeded(detail);
      }
      throw RateLimited(detail);
    default: break;
  }
  if (response.status >= 500) throw ServerError(detail);
  throw ProviderError(detail);
}

}  // namespace xrauthor::providers

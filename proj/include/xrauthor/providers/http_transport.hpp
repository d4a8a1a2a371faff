#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <utility>
#include <vector>

namespace xrauthor::providers {

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  std::string body;
  HttpHeaders headers;

  std::optional<std::string> header(const std::string& name) const;
};

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/' or is empty
};

// Throws InvalidArgument for urls without scheme and host.
UrlParts split_url(const std::string& url);

// Caps in-flight requests per provider.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(int max_in_flight);

  class Permit {
   public:
    explicit Permit(ConcurrencyLimiter& owner) : owner_(&owner) {}
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    ~Permit() { owner_->sem_.release(); }

   private:
    ConcurrencyLimiter* owner_;
  };

  [[nodiscard]] Permit acquire();

 private:
  std::counting_semaphore<1024> sem_;
};

// Thin blocking HTTP client over cpp-httplib. Transport-level failures map
// onto NetworkError / TimeoutError; HTTP statuses are returned as-is.
class HttpTransport {
 public:
  HttpTransport(std::string base_url, std::chrono::seconds timeout, int max_in_flight = 4);

  HttpResponse post_json(const std::string& path, const std::string& body, const HttpHeaders& headers);
  HttpResponse get(const std::string& path, const HttpHeaders& headers);
  // Absolute url on any host, following redirects.
  HttpResponse get_url(const std::string& url, const HttpHeaders& headers = {});

  const std::string& base_url() const { return base_url_; }

 private:
  HttpResponse send(const std::string& origin, const std::string& method, const std::string& path,
                    const std::string& body, const HttpHeaders& headers);

  std::string base_url_;
  UrlParts base_;
  std::chrono::seconds timeout_;
  ConcurrencyLimiter limiter_;
};

// Maps a non-2xx response onto the provider error hierarchy and throws.
[[noreturn]] void throw_for_status(const HttpResponse& response, const std::string& context);

}  // namespace xrauthor::providers

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace xrauthor {

// Base of every error the library throws. `kind()` is a stable name
// ("DigestMismatch", "IllegalState", ...) used by the CLI and HTTP layer.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message);

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Field-level validation failure. `fields` maps a field path to its message.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::map<std::string, std::string> fields);
  ValidationError(const std::string& field, const std::string& message);

  const std::map<std::string, std::string>& fields() const noexcept { return fields_; }

 private:
  std::map<std::string, std::string> fields_;
};

class IllegalState : public Error {
 public:
  explicit IllegalState(const std::string& message) : Error("IllegalState", message) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message) : Error("InvalidArgument", message) {}
};

class StorageError : public Error {
 public:
  explicit StorageError(const std::string& message, std::string kind = "StorageError")
      : Error(std::move(kind), message) {}
};

// Raised when a compare-and-set save loses against a concurrent writer.
class ConcurrentModification : public StorageError {
 public:
  explicit ConcurrentModification(const std::string& message)
      : StorageError(message, "ConcurrentModification") {}
};

class Cancelled : public Error {
 public:
  explicit Cancelled(const std::string& message) : Error("Cancelled", message) {}
};

// Provider failures. Every subclass is a ProviderError so that the pipeline
// can map them all onto Failed(ProviderError).
class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& message, std::string kind = "ProviderError")
      : Error(std::move(kind), message) {}

  // Transient errors are retried by the provider-level backoff.
  virtual bool transient() const noexcept { return false; }
};

class AuthError : public ProviderError {
 public:
  explicit AuthError(const std::string& message) : ProviderError(message, "AuthError") {}
};

class RateLimited : public ProviderError {
 public:
  explicit RateLimited(const std::string& message) : ProviderError(message, "RateLimited") {}
  bool transient() const noexcept override { return true; }
};

class TimeoutError : public ProviderError {
 public:
  explicit TimeoutError(const std::string& message) : ProviderError(message, "TimeoutError") {}
  bool transient() const noexcept override { return true; }
};

class QuotaExceeded : public ProviderError {
 public:
  explicit QuotaExceeded(const std::string& message) : ProviderError(message, "QuotaExceeded") {}
};

class NetworkError : public ProviderError {
 public:
  explicit NetworkError(const std::string& message, bool transient = false)
      : ProviderError(message, "NetworkError"), transient_(transient) {}
  bool transient() const noexcept override { return transient_; }

 private:
  bool transient_;
};

// HTTP 5xx from a provider.
class ServerError : public ProviderError {
 public:
  explicit ServerError(const std::string& message) : ProviderError(message, "ServerError") {}
  bool transient() const noexcept override { return true; }
};

class NotFound : public ProviderError {
 public:
  explicit NotFound(const std::string& message) : ProviderError(message, "NotFound") {}
};

class UnknownTask : public ProviderError {
 public:
  explicit UnknownTask(const std::string& message) : ProviderError(message, "UnknownTask") {}
};

// The search provider failed; enrichment degrades instead of failing.
class SearchError : public ProviderError {
 public:
  explicit SearchError(const std::string& message) : ProviderError(message, "SearchError") {}
};

// Agent output that never satisfied its schema within the repair budget.
class MalformedOutput : public Error {
 public:
  MalformedOutput(const std::string& message, std::vector<std::string> problems);

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

class NoJsonFound : public Error {
 public:
  explicit NoJsonFound(const std::string& message) : Error("NoJsonFound", message) {}
};

}  // namespace xrauthor

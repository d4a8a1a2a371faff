#include "xrauthor/common/errors.hpp"

#include <sstream>

namespace xrauthor {

namespace {

std::string describe_fields(const std::map<std::string, std::string>& fields) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [field, message] : fields) {
    if (!first) out << "; ";
    out << field << ": " << message;
    first = false;
  }
  return out.str();
}

std::string describe_problems(const std::string& message, const std::vector<std::string>& problems) {
  std::ostringstream out;
  out << message;
  for (const auto& p : problems) out << "\n  - " << p;
  return out.str();
}

}  // namespace

Error::Error(std::string kind, const std::string& message)
    : std::runtime_error(message), kind_(std::move(kind)) {}

ValidationError::ValidationError(std::map<std::string, std::string> fields)
    : Error("ValidationError", describe_fields(fields)), fields_(std::move(fields)) {}

ValidationError::ValidationError(const std::string& field, const std::string& message)
    : ValidationError(std::map<std::string, std::string>{{field, message}}) {}

MalformedOutput::MalformedOutput(const std::string& message, std::vector<std::string> problems)
    : Error("MalformedOutput", describe_problems(message, problems)), problems_(std::move(problems)) {}

}  // namespace xrauthor

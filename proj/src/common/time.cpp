#include "xrauthor/common/time.hpp"

#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace xrauthor {

std::string format_timestamp(Timestamp t) {
  const auto ms = t.time_since_epoch().count();
  std::time_t secs = static_cast<std::time_t>(ms / 1000);
  long millis = static_cast<long>(ms % 1000);
  if (millis < 0) {
    millis += 1000;
    secs -= 1;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03ldZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, millis);
  return buf;
}

Timestamp parse_timestamp(const std::string& s) {
  std::tm tm{};
  int millis = 0;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                  &tm.tm_min, &tm.tm_sec, &millis, &consumed) != 7 ||
      static_cast<size_t>(consumed) != s.size()) {
    throw std::invalid_argument("bad timestamp: " + s);
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  const std::time_t secs = timegm(&tm);
  return Timestamp(std::chrono::milliseconds(static_cast<std::int64_t>(secs) * 1000 + millis));
}

Timestamp SystemClock::now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

SteppedClock::SteppedClock(Timestamp start, std::chrono::milliseconds step) : next_(start), step_(step) {}

Timestamp SteppedClock::now() {
  std::lock_guard lock(mu_);
  const Timestamp t = next_;
  next_ += step_;
  return t;
}

namespace {

std::string hex128(std::mt19937_64& rng) {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

}  // namespace

RandomIdSource::RandomIdSource() {
  std::random_device rd;
  std::seed_seq seq{rd(), rd(), rd(), rd()};
  rng_.seed(seq);
}

std::string RandomIdSource::next_id() {
  std::lock_guard lock(mu_);
  return hex128(rng_);
}

SeededIdSource::SeededIdSource(std::uint64_t seed) : rng_(seed) {}

std::string SeededIdSource::next_id() {
  std::lock_guard lock(mu_);
  return hex128(rng_);
}

}  // namespace xrauthor

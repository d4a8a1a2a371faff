#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <random>
#include <string>

namespace xrauthor {

using Timestamp = std::chrono::time_point<std::chrono::system_clock, std::chrono::milliseconds>;

// "2025-01-01T00:00:00.000Z"
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(const std::string& s);

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() override;
};

// Deterministic clock: starts at a fixed instant and advances by `step` per read.
class SteppedClock final : public Clock {
 public:
  explicit SteppedClock(Timestamp start, std::chrono::milliseconds step = std::chrono::milliseconds(1));
  Timestamp now() override;

 private:
  std::mutex mu_;
  Timestamp next_;
  std::chrono::milliseconds step_;
};

class IdSource {
 public:
  virtual ~IdSource() = default;
  // 32 lowercase hex characters.
  virtual std::string next_id() = 0;
};

class RandomIdSource final : public IdSource {
 public:
  RandomIdSource();
  std::string next_id() override;

 private:
  std::mutex mu_;
  std::mt19937_64 rng_;
};

class SeededIdSource final : public IdSource {
 public:
  explicit SeededIdSource(std::uint64_t seed);
  std::string next_id() override;

 private:
  std::mutex mu_;
  std::mt19937_64 rng_;
};

}  // namespace xrauthor

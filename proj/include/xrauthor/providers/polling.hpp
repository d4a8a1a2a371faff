#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <stop_token>
#include <string>

#include "xrauthor/providers/generation.hpp"

namespace xrauthor::providers {

// Time source for poll loops; tests substitute a virtual clock.
class Waiter {
 public:
  using time_point = std::chrono::steady_clock::time_point;

  virtual ~Waiter() = default;
  virtual time_point now() = 0;
  // Returns early when `stop` is requested.
  virtual void sleep_for(std::chrono::milliseconds d, std::stop_token stop) = 0;
};

class SteadyWaiter final : public Waiter {
 public:
  time_point now() override { return std::chrono::steady_clock::now(); }
  void sleep_for(std::chrono::milliseconds d, std::stop_token stop) override;

 private:
  std::mutex mu_;
  std::condition_variable_any cv_;
};

// Virtual time: sleeping advances the clock instantly.
class ManualWaiter final : public Waiter {
 public:
  time_point now() override { return now_; }
  void sleep_for(std::chrono::milliseconds d, std::stop_token) override { now_ += d; }

 private:
  time_point now_{};
};

struct PollOptions {
  std::chrono::milliseconds interval{5000};
  std::chrono::milliseconds deadline{std::chrono::minutes(10)};
};

// Polls until the task is terminal. Throws TimeoutError once the next poll
// would land past the deadline, Cancelled when `stop` is requested, and
// ProviderError if the observed status ever regresses.
GenerationTask poll_generation(GenerationProvider& provider, const std::string& task_id, const PollOptions& options,
                               Waiter& waiter, std::stop_token stop,
                               const std::function<void(const GenerationTask&)>& on_poll = {});

}  // namespace xrauthor::providers

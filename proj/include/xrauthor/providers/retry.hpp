#pragma once

#include <chrono>
#include <functional>

#include "xrauthor/common/errors.hpp"

namespace xrauthor::providers {

// Transient-failure policy for provider calls: up to `max_attempts` tries with
// delays initial_delay, initial_delay*multiplier, ...
struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_delay{1000};
  double multiplier = 2.0;

  std::chrono::milliseconds delay_before_attempt(int attempt) const;  // attempt >= 2
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

Sleeper real_sleeper();

// Runs `fn`, retrying when it throws a ProviderError whose transient() is true.
// The last error is rethrown once the attempts are used up.
template <class F>
auto with_retries(const RetryPolicy& policy, const Sleeper& sleep, F&& fn) -> decltype(fn()) {
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const ProviderError& e) {
      if (!e.transient() || attempt >= policy.max_attempts) throw;
    }
    sleep(policy.delay_before_attempt(attempt + 1));
  }
}

}  // namespace xrauthor::providers

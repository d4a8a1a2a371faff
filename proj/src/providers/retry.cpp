#include "xrauthor/providers/retry.hpp"

#include <cmath>
#include <thread>

namespace xrauthor::providers {

std::chrono::milliseconds RetryPolicy::delay_before_attempt(int attempt) const {
  const double factor = std::pow(multiplier, attempt - 2);
  return std::chrono::milliseconds(static_cast<long long>(static_cast<double>(initial_delay.count()) * factor));
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

}  // namespace xrauthor::providers

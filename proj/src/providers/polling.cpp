#include "xrauthor/providers/polling.hpp"

#include "xrauthor/common/errors.hpp"

namespace xrauthor::providers {

namespace {

int rank(TaskStatus s) {
  switch (s) {
    case TaskStatus::Pending: return 0;
    case TaskStatus::InProgress: return 1;
    case TaskStatus::Succeeded:
    case TaskStatus::Failed: return 2;
  }
  return 0;
}

}  // namespace

void SteadyWaiter::sleep_for(std::chrono::milliseconds d, std::stop_token stop) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, stop, d, [] { return false; });
}

GenerationTask poll_generation(GenerationProvider& provider, const std::string& task_id, const PollOptions& options,
                               Waiter& waiter, std::stop_token stop,
                               const std::function<void(const GenerationTask&)>& on_poll) {
  const auto started = waiter.now();
  int last_rank = -1;
  for (;;) {
    if (stop.stop_requested()) throw Cancelled("polling of " + task_id + " cancelled");
    auto task = provider.get_task(task_id);
    if (on_poll) on_poll(task);
    if (rank(task.status) < last_rank) {
      throw ProviderError("generation task " + task_id + " regressed to " + to_string(task.status));
    }
    last_rank = rank(task.status);
    if (task.terminal()) return task;
    if (waiter.now() - started + options.interval > options.deadline) {
      throw TimeoutError("generation task " + task_id + " did not finish before the deadline");
    }
    waiter.sleep_for(options.interval, stop);
  }
}

}  // namespace xrauthor::providers

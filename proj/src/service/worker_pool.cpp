#include "xrauthor/service/worker_pool.hpp"

#include <cstdio>
#include <exception>

namespace xrauthor::service {

WorkerPool::WorkerPool(size_t workers) {
  if (workers == 0) workers = 1;
  threads_.reserve(workers);
  for (size_t i = 0; i < workers; ++i) {
    threads_.emplace_back([this](std::stop_token stop) { run(stop); });
  }
}

WorkerPool::~WorkerPool() { shutdown(); }

bool WorkerPool::post(Task task) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return false;
    queue_.push_back(std::move(task));
  }
  cv_.notify_one();
  return true;
}

void WorkerPool::shutdown() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
    queue_.clear();
  }
  for (auto& t : threads_) t.request_stop();
  cv_.notify_all();
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  idle_cv_.notify_all();
}

void WorkerPool::wait_idle() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [this] { return (queue_.empty() && running_ == 0) || closed_; });
}

void WorkerPool::run(std::stop_token stop) {
  while (true) {
    Task task;
    {
      std::unique_lock lock(mu_);
      if (!cv_.wait(lock, stop, [this] { return !queue_.empty(); })) return;
      task = std::move(queue_.front());
      queue_.pop_front();
      ++running_;
    }
    try {
      task(stop);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "worker task failed: %s\n", e.what());
    }
    {
      std::lock_guard lock(mu_);
      --running_;
    }
    idle_cv_.notify_all();
  }
}

}  // namespace xrauthor::service

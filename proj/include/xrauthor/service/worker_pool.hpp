#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <stop_token>
#include <thread>
#include <vector>

namespace xrauthor::service {

// Fixed set of threads draining a FIFO queue. Tasks receive the pool's stop
// token; shutdown() requests stop, drops queued tasks and joins.
class WorkerPool {
 public:
  using Task = std::function<void(std::stop_token)>;

  explicit WorkerPool(size_t workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  // Returns false once the pool is shutting down.
  bool post(Task task);
  void shutdown();
  // Blocks until the queue is empty and no task is running.
  void wait_idle();

  size_t size() const { return threads_.size(); }

 private:
  void run(std::stop_token stop);

  std::mutex mu_;
  std::condition_variable_any cv_;
  std::condition_variable idle_cv_;
  std::deque<Task> queue_;
  size_t running_ = 0;
  bool closed_ = false;
  std::vector<std::jthread> threads_;
};

}  // namespace xrauthor::service

#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <stop_token>
#include <string>
#include <vector>

#include "xrauthor/agents/agents.hpp"
#include "xrauthor/agents/prompts.hpp"
#include "xrauthor/common/time.hpp"
#include "xrauthor/pipeline/job_store.hpp"
#include "xrauthor/providers/config.hpp"
#include "xrauthor/providers/polling.hpp"
#include "xrauthor/service/worker_pool.hpp"

namespace httplib {
class Server;
}

namespace xrauthor::service {

struct ServiceContext {
  std::shared_ptr<pipeline::JobStore> store;
  providers::ProviderSet providers;
  agents::PromptSet prompts;
  std::shared_ptr<Clock> clock;
  std::shared_ptr<IdSource> ids;
  std::shared_ptr<providers::Waiter> waiter;
  providers::PollOptions poll;
  agents::AgentOptions agent_options;
  std::vector<std::string> secrets;
  std::string provider_mode = "mock";
};

struct ServerOptions {
  size_t max_jobs = 2;
  std::string cors_origin = "*";
  size_t events_tail = 50;
  // Comment frames keep idle event streams open through proxies.
  std::chrono::milliseconds keepalive{10000};
  size_t http_threads = 16;
  // Observes every persisted stage; used by liveness checks.
  std::function<void(const pipeline::PipelineJob&)> after_stage;
};

// Routes:
//   GET  /api/health
//   POST /api/jobs                     -> 201 {job_id}
//   GET  /api/jobs/{id}                -> JobView
//   GET  /api/jobs/{id}/events         -> text/event-stream, ?offset=n or Last-Event-ID
//   POST /api/jobs/{id}/approval       -> JobView
//   GET  /api/bundles/{id}/{file}      -> manifest.json, model.glb, tutor.json
class Server {
 public:
  Server(ServiceContext context, ServerOptions options = {});
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws InvalidArgument
  // when binding fails.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void serve();
  void stop();

  void wait_idle() { pool_.wait_idle(); }

 private:
  void install_routes();
  void start_job(const std::string& job_id);

  ServiceContext ctx_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> http_;
  WorkerPool pool_;
  std::stop_source stop_;
};

}  // namespace xrauthor::service

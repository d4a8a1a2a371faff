// xrauthor-server: HTTP API for the teacher console.

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <iostream>
#include <thread>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/providers/config.hpp"
#include "xrauthor/service/server.hpp"

using namespace xrauthor;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"XR lesson authoring service"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir = "data";
  std::string provider_mode;
  std::string fixtures;
  std::string prompts_dir;
  std::string config_file;
  std::string cors_origin = "*";
  size_t max_jobs = 2;
  int poll_interval_ms = -1;

  app.add_option("--host", host, "Listen address");
  app.add_option("--port", port, "Listen port (0 picks a free one)");
  app.add_option("--data-dir", data_dir, "Job store root");
  app.add_option("--provider-mode", provider_mode, "mock or live (default: from environment)");
  app.add_option("--max-jobs", max_jobs, "Jobs running concurrently")->check(CLI::PositiveNumber);
  app.add_option("--cors-origin", cors_origin, "Allowed browser origin");
  app.add_option("--fixtures", fixtures, "Mock fixture directory");
  app.add_option("--prompts-dir", prompts_dir, "Directory holding the agent prompts");
  app.add_option("--config", config_file, "JSON file with non-secret provider settings");
  app.add_option("--poll-interval-ms", poll_interval_ms, "Generation poll interval");
  CLI11_PARSE(app, argc, argv);

  try {
    auto config = providers::load_provider_config(
        providers::process_environment(),
        config_file.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_file));
    if (!provider_mode.empty()) {
      auto mode = providers::parse_provider_mode(provider_mode);
      if (!mode) throw InvalidArgument("--provider-mode must be mock or live");
      config.mode = *mode;
    }
    if (!fixtures.empty()) config.mock_fixture_dir = fixtures;

    service::ServiceContext ctx;
    ctx.store = std::make_shared<pipeline::FileJobStore>(data_dir);
    ctx.providers = providers::make_providers(config);
    ctx.prompts = agents::PromptSet::load(prompts_dir.empty() ? agents::default_prompts_dir()
                                                              : std::filesystem::path(prompts_dir));
    ctx.clock = std::make_shared<SystemClock>();
    ctx.ids = std::make_shared<RandomIdSource>();
    ctx.waiter = std::make_shared<providers::SteadyWaiter>();
    const int interval =
        poll_interval_ms >= 0 ? poll_interval_ms : (config.mode == providers::ProviderMode::Mock ? 20 : 5000);
    ctx.poll.interval = std::chrono::milliseconds(interval);
    ctx.secrets = config.secrets();
    ctx.provider_mode = providers::to_string(config.mode);

    service::ServerOptions options;
    options.max_jobs = max_jobs;
    options.cors_origin = cors_origin;

    service::Server server(std::move(ctx), options);
    const int bound = server.bind(host, port);
    std::cout << "listening on http://" << host << ":" << bound << " (" << providers::to_string(config.mode)
              << " providers)" << std::endl;

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::jthread watcher([&server](std::stop_token done) {
      while (!done.stop_requested() && !g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
    });
    server.serve();
    watcher.request_stop();
  } catch (const Error& e) {
    std::cerr << e.kind() << ": " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}

#include "xrauthor/service/server.hpp"

#include <httplib.h>

#include <cstdio>
#include <fstream>
#include <iterator>

#include "xrauthor/common/errors.hpp"
#include "xrauthor/common/text.hpp"
#include "xrauthor/pipeline/pipeline.hpp"
#include "xrauthor/service/job_view.hpp"

namespace xrauthor::service {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kJsonType = "application/json";

json error_body(const std::string& kind, const std::string& message) {
  return json{{"error", kind}, {"message", message}};
}

std::optional<size_t> parse_offset(const std::string& s) {
  if (s.empty() || s.size() > 18) return std::nullopt;
  size_t value = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + static_cast<size_t>(c - '0');
  }
  return value;
}

std::string content_type_for(const std::string& file) {
  if (file.ends_with(".glb")) return "model/gltf-binary";
  if (file.ends_with(".json")) return kJsonType;
  return "application/octet-stream";
}

}  // namespace

Server::Server(ServiceContext context, ServerOptions options)
    : ctx_(std::move(context)),
      options_(std::move(options)),
      http_(std::make_unique<httplib::Server>()),
      pool_(options_.max_jobs) {
  if (!ctx_.store || !ctx_.clock || !ctx_.ids || !ctx_.waiter || !ctx_.providers.chat || !ctx_.providers.generation ||
      !ctx_.providers.search) {
    throw InvalidArgument("service context is incomplete");
  }
  const size_t threads = options_.http_threads;
  http_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  install_routes();
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = http_->bind_to_any_port(host);
    if (bound <= 0) throw InvalidArgument("cannot bind " + host);
    return bound;
  }
  if (!http_->bind_to_port(host, port)) throw InvalidArgument("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void Server::serve() { http_->listen_after_bind(); }

void Server::stop() {
  stop_.request_stop();
  pool_.shutdown();
  http_->stop();
}

void Server::start_job(const std::string& job_id) {
  pool_.post([this, job_id](std::stop_token stop) {
    pipeline::StageDependencies deps;
    deps.chat = ctx_.providers.chat.get();
    deps.generation = ctx_.providers.generation.get();
    deps.search = ctx_.providers.search.get();
    deps.prompts = &ctx_.prompts;
    deps.store = ctx_.store.get();
    deps.clock = ctx_.clock.get();
    deps.waiter = ctx_.waiter.get();
    deps.poll = ctx_.poll;
    deps.agent_options = ctx_.agent_options;
    deps.stop = stop;
    deps.secrets = ctx_.secrets;
    try {
      pipeline::run_until_blocked(job_id, deps, options_.after_stage);
    } catch (const Cancelled&) {
      // Shutdown; the job stays resumable in its persisted state.
    } catch (const std::exception& e) {
      std::fprintf(stderr, "job %s stopped: %s\n", job_id.c_str(), text::redact(e.what(), ctx_.secrets).c_str());
    }
  });
}

void Server::install_routes() {
  auto& http = *http_;
  const auto secrets = ctx_.secrets;

  auto send_json = [secrets](httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(text::redact(body.dump(), secrets), kJsonType);
  };

  http.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", options_.cors_origin);
    res.set_header("Access-Control-Expose-Headers", "Content-Range, Accept-Ranges, Content-Length");
    if (options_.cors_origin != "*") res.set_header("Vary", "Origin");
  });

  http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, Last-Event-ID, Range");
    res.set_header("Access-Control-Max-Age", "600");
  });

  http.Get("/api/health", [this, send_json](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}, {"provider_mode", ctx_.provider_mode}});
  });

  http.Post("/api/jobs", [this, send_json](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      auto err = error_body("ValidationError", "request body is not valid JSON");
      err["fields"] = {{"body", "must be valid JSON"}};
      return send_json(res, 400, err);
    }
    try {
      const auto request = parse_authoring_request(body);
      const auto id = pipeline::submit(request, *ctx_.store, *ctx_.clock, *ctx_.ids);
      start_job(id);
      send_json(res, 201, {{"job_id", id}, {"job_url", "/api/jobs/" + id}});
    } catch (const ValidationError& e) {
      auto err = error_body(e.kind(), e.what());
      err["fields"] = e.fields();
      send_json(res, 400, err);
    } catch (const StorageError& e) {
      send_json(res, 503, error_body(e.kind(), e.what()));
    }
  });

  http.Get(R"(/api/jobs/([^/]+))", [this, send_json](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, 200, job_view(ctx_.store->load(req.matches[1]), options_.events_tail));
    } catch (const pipeline::JobNotFound& e) {
      send_json(res, 404, error_body(e.kind(), e.what()));
    } catch (const StorageError& e) {
      send_json(res, 503, error_body(e.kind(), e.what()));
    }
  });

  http.Get(R"(/api/jobs/([^/]+)/events)", [this, send_json, secrets](const httplib::Request& req,
                                                                      httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!ctx_.store->exists(id)) return send_json(res, 404, error_body("JobNotFound", "no job with id " + id));
    size_t start = 0;
    if (req.has_param("offset")) {
      auto parsed = parse_offset(req.get_param_value("offset"));
      if (!parsed) return send_json(res, 400, error_body("ValidationError", "offset must be a non-negative integer"));
      start = *parsed;
    } else if (req.has_header("Last-Event-ID")) {
      // Event ids are 1-based positions, so the last id seen is the next offset.
      auto parsed = parse_offset(req.get_header_value("Last-Event-ID"));
      if (parsed) start = *parsed;
    }
    res.set_header("Cache-Control", "no-cache");
    res.set_header("X-Accel-Buffering", "no");
    auto cursor = std::make_shared<size_t>(start);
    auto stop = stop_.get_token();
    const auto keepalive = options_.keepalive;
    res.set_chunked_content_provider(
        "text/event-stream", [this, id, cursor, stop, keepalive, secrets](size_t, httplib::DataSink& sink) {
          pipeline::EventBatch batch;
          try {
            batch = ctx_.store->wait_for_events(id, *cursor, keepalive, stop);
          } catch (const std::exception&) {
            return false;
          }
          std::string out;
          for (const auto& e : batch.events) {
            ++*cursor;
            out += "id: " + std::to_string(*cursor) + "\nevent: job_event\ndata: " +
                   text::redact(json(e).dump(), secrets) + "\n\n";
          }
          if (batch.events.empty() && !batch.terminal) out = ": keepalive\n\n";
          if (!out.empty() && !sink.write(out.data(), out.size())) return false;
          if (stop.stop_requested()) return false;
          if (batch.terminal) sink.done();
          return true;
        });
  });

  http.Post(R"(/api/jobs/([^/]+)/approval)", [this, send_json](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    try {
      auto job = ctx_.store->load(id);
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::exception&) {
        throw ValidationError("body", "must be valid JSON");
      }
      if (!body.is_object()) throw ValidationError("body", "must be a JSON object");
      const auto decision_it = body.find("decision");
      if (decision_it == body.end() || !decision_it->is_string() ||
          !pipeline::parse_approval_decision(decision_it->get<std::string>())) {
        throw ValidationError("decision", "must be \"approve\" or \"reject\"");
      }
      std::optional<ContentSpec> edited;
      if (auto it = body.find("edited_spec"); it != body.end() && !it->is_null()) {
        try {
          edited = it->get<ContentSpec>();
        } catch (const std::exception& e) {
          throw ValidationError("edited_spec", std::string("is not a valid content spec: ") + e.what());
        }
      }
      const auto decision = *pipeline::parse_approval_decision(decision_it->get<std::string>());
      job = pipeline::resolve_approval(std::move(job), decision, edited, *ctx_.store, *ctx_.clock);
      if (decision == pipeline::ApprovalDecision::Approve) start_job(id);
      send_json(res, 200, job_view(job, options_.events_tail));
    } catch (const pipeline::JobNotFound& e) {
      send_json(res, 404, error_body(e.kind(), e.what()));
    } catch (const ValidationError& e) {
      auto err = error_body(e.kind(), e.what());
      err["fields"] = e.fields();
      send_json(res, 400, err);
    } catch (const IllegalState& e) {
      send_json(res, 409, error_body(e.kind(), e.what()));
    } catch (const ConcurrentModification& e) {
      send_json(res, 409, error_body(e.kind(), e.what()));
    } catch (const StorageError& e) {
      send_json(res, 503, error_body(e.kind(), e.what()));
    }
  });

  http.Get(R"(/api/bundles/(.+))", [this, send_json](const httplib::Request& req, httplib::Response& res) {
    const std::string rest = req.matches[1];
    const auto slash = rest.find('/');
    if (rest.find("..") != std::string::npos || rest.find('\\') != std::string::npos || slash == std::string::npos ||
        rest.find('/', slash + 1) != std::string::npos) {
      return send_json(res, 403, error_body("Forbidden", "path not allowed"));
    }
    const std::string id = rest.substr(0, slash);
    const std::string file = rest.substr(slash + 1);
    if (!pipeline::is_valid_job_id(id)) return send_json(res, 403, error_body("Forbidden", "path not allowed"));
    if (file != "manifest.json" && file != "model.glb" && file != "tutor.json") {
      return send_json(res, 404, error_body("NotFound", "no such bundle file: " + file));
    }
    try {
      const auto job = ctx_.store->load(id);
      if (job.state != pipeline::JobState::Complete) {
        return send_json(res, 404, error_body("NotFound", "job " + id + " has no bundle yet"));
      }
      const fs::path path = ctx_.store->bundle_dir(id) / file;
      std::ifstream in(path, std::ios::binary);
      if (!in) return send_json(res, 404, error_body("NotFound", "missing bundle file: " + file));
      std::string data(std::istreambuf_iterator<char>(in), {});
      // Status left unset so httplib answers 206 for Range requests.
      res.set_header("Accept-Ranges", "bytes");
      res.set_content(std::move(data), content_type_for(file));
    } catch (const pipeline::JobNotFound& e) {
      send_json(res, 404, error_body(e.kind(), e.what()));
    }
  });
}

}  // namespace xrauthor::service

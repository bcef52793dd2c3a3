#include "mope/psm_server.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>

#include <httplib.h>
#include <json.hpp>

#include "mope/bundle.hpp"
#include "mope/error.hpp"

namespace mope::psm {

using nlohmann::json;

std::shared_ptr<const StrengthMeter> meter_from_bundle(const std::filesystem::path& dir,
                                                       const guess::PoolOptions& pool,
                                                       bool prefer_student) {
  auto b = bundle::load_offline(dir);
  std::shared_ptr<const CharModel> model;
  if (prefer_student && b.student) {
    model = b.student;
  } else {
    model = std::make_shared<const offline::OfflineMope>(b.mixture());
  }
  return std::make_shared<const StrengthMeter>(std::move(model), pool);
}

struct StrengthServer::Impl {
  ServerConfig cfg;
  AuditSink audit;
  httplib::Server server;
  std::mutex mu;
  std::shared_ptr<const StrengthMeter> meter;
  int port = -1;

  std::shared_ptr<const StrengthMeter> current() {
    std::lock_guard lock(mu);
    return meter;
  }

  void cors(const httplib::Request& req, httplib::Response& res) const {
    const auto origin = req.get_header_value("Origin");
    if (origin.empty()) return;
    const auto& allow = cfg.cors_origins;
    if (std::find(allow.begin(), allow.end(), "*") != allow.end()) {
      res.set_header("Access-Control-Allow-Origin", "*");
    } else if (std::find(allow.begin(), allow.end(), origin) != allow.end()) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    }
  }

  static void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  void strength(const httplib::Request& req, httplib::Response& res) {
    const auto m = current();
    if (!m) return reply(res, 503, {{"error", "model not loaded"}});
    std::string password;
    try {
      const auto body = json::parse(req.body);
      if (!body.is_object() || !body.contains("password") || !body["password"].is_string()) {
        return reply(res, 400, {{"error", "body must be {\"password\": <string>}"}});
      }
      password = body["password"].get<std::string>();
    } catch (const json::exception&) {
      return reply(res, 400, {{"error", "body is not valid JSON"}});
    }
    try {
      const auto v = m->strength(password);
      reply(res, 200,
            {{"log10_guess_number", v.log10_guess_number},
             {"level", to_string(v.level)},
             {"latency_ms", v.latency_ms}});
    } catch (const InvalidArgument& e) {
      reply(res, 400, {{"error", e.what()}});
    } catch (const DataError& e) {
      reply(res, 400, {{"error", e.what()}});
    }
  }
};

StrengthServer::StrengthServer(ServerConfig cfg, AuditSink audit) : impl_(std::make_unique<Impl>()) {
  impl_->cfg = std::move(cfg);
  impl_->audit = audit ? std::move(audit) : [](std::string_view line) {
    std::fprintf(stderr, "%.*s\n", static_cast<int>(line.size()), line.data());
  };
  auto* im = impl_.get();
  im->server.Get("/healthz", [im](const httplib::Request& req, httplib::Response& res) {
    im->cors(req, res);
    Impl::reply(res, 200, {{"status", "ok"}});
  });
  im->server.Post("/v1/strength", [im](const httplib::Request& req, httplib::Response& res) {
    im->cors(req, res);
    im->strength(req, res);
  });
  im->server.Options("/v1/strength", [im](const httplib::Request& req, httplib::Response& res) {
    im->cors(req, res);
    res.set_header("Access-Control-Allow-Methods", "POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  im->server.set_logger([im](const httplib::Request& req, const httplib::Response& res) {
    char line[256];
    std::snprintf(line, sizeof line, "%s %s %d", req.method.c_str(), req.path.c_str(), res.status);
    im->audit(line);
  });
}

StrengthServer::~StrengthServer() { stop(); }

void StrengthServer::set_meter(std::shared_ptr<const StrengthMeter> meter) {
  std::lock_guard lock(impl_->mu);
  impl_->meter = std::move(meter);
}

int StrengthServer::bind() {
  auto& s = impl_->server;
  const auto& c = impl_->cfg;
  if (c.port == 0) {
    impl_->port = s.bind_to_any_port(c.host);
  } else {
    impl_->port = s.bind_to_port(c.host, c.port) ? c.port : -1;
  }
  if (impl_->port < 0) throw DataError("cannot bind " + c.host + ":" + std::to_string(c.port));
  return impl_->port;
}

void StrengthServer::listen() { impl_->server.listen_after_bind(); }

void StrengthServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace mope::psm

#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mope/psm.hpp"

namespace mope::psm {

inline constexpr int kDefaultPort = 8342;

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = kDefaultPort;  // 0 binds any free port
  std::vector<std::string> cors_origins{"http://localhost:8000", "http://127.0.0.1:8000"};
};

/// Receives one line per request (method, path, status). Request
/// bodies never reach it.
using AuditSink = std::function<void(std::string_view)>;

/// Meter over the bundle's distilled student when it has one and
/// `prefer_student` is set, otherwise over the full mixture.
std::shared_ptr<const StrengthMeter> meter_from_bundle(const std::filesystem::path& dir,
                                                       const guess::PoolOptions& pool,
                                                       bool prefer_student = true);

/// POST /v1/strength and GET /healthz. Answers 503 until a meter is set.
class StrengthServer {
 public:
  explicit StrengthServer(ServerConfig cfg, AuditSink audit = {});
  ~StrengthServer();
  StrengthServer(const StrengthServer&) = delete;
  StrengthServer& operator=(const StrengthServer&) = delete;

  void set_meter(std::shared_ptr<const StrengthMeter> meter);

  /// Binds and returns the port; throws DataError when binding fails.
  int bind();
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mope::psm

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fltc/config.hpp"
#include "fltc/loop.hpp"

namespace fltc {

/// The "service" section of a run configuration document:
///   { "time_scale", "setpoint_limits": [lo, hi], "record_dir", "buffer_frames" }
struct ServiceOptions {
  /// Simulated seconds per wall-clock second. 0 runs unpaced.
  double time_scale = 1.0;
  double setpoint_lo = 0.0;
  double setpoint_hi = 120.0;
  std::string record_dir = "runs";
  /// Per-subscriber queue bound; a subscriber that falls this far behind
  /// is disconnected.
  std::size_t buffer_frames = 1024;
};

Json service_options_to_json(const ServiceOptions& opts);
/// Reads doc["service"] when present. Field paths are "/service/...".
ServiceOptions service_options_from_json(const Json& doc);

enum class Phase { Idle, Running, Stopped };
std::string_view to_string(Phase phase);

/// One telemetry consumer. Messages are NDJSON lines without the newline.
class Subscription {
 public:
  explicit Subscription(std::size_t capacity) : capacity_(capacity) {}

  /// Waits up to `timeout` for the next message. Empty when nothing
  /// arrived or the subscription is closed.
  std::optional<std::string> next(std::chrono::milliseconds timeout);
  bool closed() const;
  bool overflowed() const;
  void close();

  /// Never blocks on the consumer; closes the subscription when full.
  void push(const std::string& message);

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> queue_;
  std::size_t capacity_;
  bool closed_ = false;
  bool overflowed_ = false;
};

/// Owns at most one running control loop. The loop runs on its own thread;
/// setpoint and stop commands go through a queue drained once per sample,
/// and completed frames fan out to subscribers through bounded queues.
class SessionManager {
 public:
  /// `base_config` is the run configuration used when start_run gets an
  /// empty document.
  SessionManager(ServiceOptions options, Json base_config);
  ~SessionManager();
  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  const ServiceOptions& options() const noexcept { return options_; }

  Json state() const;
  Phase phase() const;

  /// Throws ConfigError on an invalid document, Error(Conflict) while a
  /// run is active. A null or empty-object document uses the base config.
  std::string start_run(const Json& config_doc);
  /// Returns the acknowledged setpoint. Error(OutOfRange) outside the
  /// limits, Error(Conflict) when no run is active.
  double set_setpoint(double value);
  /// Halts the loop at the next sample, persists the record and returns
  /// its run id. Error(Conflict) when no run is active.
  std::string stop_run();
  /// Blocks until the current run (if any) ends on its own.
  void wait();

  /// Persisted record text for a run id. Error(NotFound) when absent.
  std::string record_text(const std::string& run_id) const;
  std::string record_path(const std::string& run_id) const;

  std::shared_ptr<Subscription> subscribe();
  /// Stops any active run (persisting it) and closes every subscription.
  void shutdown();

 private:
  struct Command {
    enum class Kind { Setpoint, Stop } kind;
    double value = 0.0;
  };

  void run_loop(ControlLoop loop, std::string run_id);
  void publish(const std::string& run_id, const TelemetryFrame& frame);
  void join_loop_thread();

  ServiceOptions options_;
  Json base_config_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  Phase phase_ = Phase::Idle;
  std::string run_id_;
  Json active_config_;
  std::optional<Json> last_frame_;
  std::size_t frame_total_ = 0;
  double current_setpoint_ = 0.0;
  std::deque<Command> commands_;
  std::vector<std::weak_ptr<Subscription>> subscribers_;
  std::size_t run_counter_ = 0;
  bool stop_requested_ = false;
  std::string last_persist_error_;
  bool shut_down_ = false;
  std::mutex join_mu_;
  std::thread loop_thread_;
};

/// HTTP front end over a SessionManager:
///   GET  /state
///   POST /runs                    (config body, may be empty) -> {"run_id"}
///   POST /runs/current/setpoint   {"value"}
///   POST /runs/current/stop       -> {"run_id"}
///   GET  /runs/{id}/record
///   GET  /telemetry               NDJSON, one frame per line
/// Errors are {"code", "message", "details"}.
class HttpService {
 public:
  explicit HttpService(SessionManager& manager);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds without serving. Port 0 picks a free port. Returns the bound
  /// port; throws Error(Io) when the address cannot be bound.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ListenAddress {
  std::string host;
  int port;
};

/// Parses "host:port". Throws Error(InvalidInput) on malformed input.
ListenAddress parse_listen_address(const std::string& text);

}  // namespace fltc

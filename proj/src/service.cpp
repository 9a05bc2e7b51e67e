#include "fltc/service.hpp"

#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fltc/error.hpp"

namespace fltc {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

bool valid_run_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%S", &tm);
  return buf;
}

}  // namespace

Json service_options_to_json(const ServiceOptions& o) {
  return Json{{"time_scale", o.time_scale},
              {"setpoint_limits", Json::array({o.setpoint_lo, o.setpoint_hi})},
              {"record_dir", o.record_dir},
              {"buffer_frames", o.buffer_frames}};
}

ServiceOptions service_options_from_json(const Json& doc) {
  ServiceOptions o;
  if (!doc.is_object() || !doc.contains("service")) return o;
  const auto& s = doc.at("service");
  std::vector<FieldIssue> issues;
  if (!s.is_object()) throw ConfigError("/service", "expected an object");
  for (const auto& [key, value] : s.items()) {
    const std::string path = "/service/" + key;
    if (key == "time_scale") {
      if (!value.is_number() || value.get<double>() < 0.0 || !std::isfinite(value.get<double>())) {
        issues.push_back({path, "expected a non-negative number"});
      } else {
        o.time_scale = value.get<double>();
      }
    } else if (key == "setpoint_limits") {
      if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number() ||
          !(value[0].get<double>() < value[1].get<double>())) {
        issues.push_back({path, "expected [lo, hi] with lo < hi"});
      } else {
        o.setpoint_lo = value[0].get<double>();
        o.setpoint_hi = value[1].get<double>();
      }
    } else if (key == "record_dir") {
      if (!value.is_string() || value.get<std::string>().empty()) {
        issues.push_back({path, "expected a non-empty string"});
      } else {
        o.record_dir = value.get<std::string>();
      }
    } else if (key == "buffer_frames") {
      if (!value.is_number_unsigned() || value.get<std::size_t>() == 0) {
        issues.push_back({path, "expected a positive integer"});
      } else {
        o.buffer_frames = value.get<std::size_t>();
      }
    } else {
      issues.push_back({path, "unknown key"});
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return o;
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Idle: return "idle";
    case Phase::Running: return "running";
    case Phase::Stopped: return "stopped";
  }
  return "unknown";
}

std::optional<std::string> Subscription::next(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || closed_; });
  // Drain what was queued before an overflow close, but not after.
  if (queue_.empty() || overflowed_) return std::nullopt;
  std::string msg = std::move(queue_.front());
  queue_.pop_front();
  return msg;
}

bool Subscription::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

bool Subscription::overflowed() const {
  std::lock_guard lock(mu_);
  return overflowed_;
}

void Subscription::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

void Subscription::push(const std::string& message) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    if (queue_.size() >= capacity_) {
      overflowed_ = true;
      closed_ = true;
      queue_.clear();
    } else {
      queue_.push_back(message);
    }
  }
  cv_.notify_all();
}

SessionManager::SessionManager(ServiceOptions options, Json base_config)
    : options_(std::move(options)), base_config_(std::move(base_config)) {
  if (base_config_.is_null()) base_config_ = config_to_json(default_config());
}

SessionManager::~SessionManager() { shutdown(); }

Phase SessionManager::phase() const {
  std::lock_guard lock(mu_);
  return phase_;
}

Json SessionManager::state() const {
  std::lock_guard lock(mu_);
  Json s{{"phase", to_string(phase_)}};
  if (phase_ == Phase::Idle) {
    s["config"] = base_config_;
  } else {
    s["run_id"] = run_id_;
    s["config"] = active_config_;
    s["setpoint"] = current_setpoint_;
    s["frames"] = frame_total_;
    s["frame"] = last_frame_ ? *last_frame_ : Json(nullptr);
    if (!last_persist_error_.empty()) s["persist_error"] = last_persist_error_;
  }
  s["setpoint_limits"] = Json::array({options_.setpoint_lo, options_.setpoint_hi});
  return s;
}

std::string SessionManager::start_run(const Json& config_doc) {
  {
    std::lock_guard lock(mu_);
    if (phase_ == Phase::Running) throw Error(ErrorKind::Conflict, "a run is already active: " + run_id_);
    if (shut_down_) throw Error(ErrorKind::Conflict, "service is shutting down");
  }
  const bool use_base = config_doc.is_null() || (config_doc.is_object() && config_doc.empty());
  const Json& doc = use_base ? base_config_ : config_doc;
  LoopConfig config = config_from_json(doc);
  if (config.setpoint < options_.setpoint_lo || config.setpoint > options_.setpoint_hi) {
    std::ostringstream msg;
    msg << "setpoint must lie within [" << format_number(options_.setpoint_lo) << ", "
        << format_number(options_.setpoint_hi) << "]";
    throw ConfigError("/loop/setpoint", msg.str());
  }
  ControlLoop loop(config);
  std::error_code ec;
  fs::create_directories(options_.record_dir, ec);
  if (ec) throw Error(ErrorKind::Io, options_.record_dir + ": " + ec.message());

  join_loop_thread();  // a finished previous run
  std::lock_guard lock(mu_);
  if (phase_ == Phase::Running) throw Error(ErrorKind::Conflict, "a run is already active: " + run_id_);
  run_id_ = "run-" + timestamp_utc() + "-" + std::to_string(++run_counter_);
  active_config_ = config_to_json(config);
  last_frame_.reset();
  frame_total_ = 0;
  current_setpoint_ = config.setpoint;
  commands_.clear();
  stop_requested_ = false;
  last_persist_error_.clear();
  phase_ = Phase::Running;
  loop_thread_ = std::thread(&SessionManager::run_loop, this, std::move(loop), run_id_);
  return run_id_;
}

double SessionManager::set_setpoint(double value) {
  std::lock_guard lock(mu_);
  if (phase_ != Phase::Running || stop_requested_) {
    throw Error(ErrorKind::Conflict, std::string("no active run (phase ") + std::string(to_string(phase_)) + ")");
  }
  if (!std::isfinite(value) || value < options_.setpoint_lo || value > options_.setpoint_hi) {
    throw Error(ErrorKind::OutOfRange, "setpoint " + format_number(value) + " outside [" +
                                           format_number(options_.setpoint_lo) + ", " +
                                           format_number(options_.setpoint_hi) + "]");
  }
  commands_.push_back({Command::Kind::Setpoint, value});
  return value;
}

std::string SessionManager::stop_run() {
  std::string id;
  {
    std::lock_guard lock(mu_);
    if (phase_ != Phase::Running || stop_requested_) {
      throw Error(ErrorKind::Conflict, std::string("no active run (phase ") + std::string(to_string(phase_)) + ")");
    }
    stop_requested_ = true;
    commands_.push_back({Command::Kind::Stop, 0.0});
    id = run_id_;
  }
  cv_.notify_all();
  join_loop_thread();
  return id;
}

void SessionManager::wait() { join_loop_thread(); }

void SessionManager::join_loop_thread() {
  std::lock_guard join(join_mu_);
  if (loop_thread_.joinable()) loop_thread_.join();
}

std::string SessionManager::record_path(const std::string& run_id) const {
  return (fs::path(options_.record_dir) / (run_id + ".json")).string();
}

std::string SessionManager::record_text(const std::string& run_id) const {
  if (!valid_run_id(run_id)) throw Error(ErrorKind::NotFound, "no record for run '" + run_id + "'");
  {
    std::lock_guard lock(mu_);
    if (phase_ == Phase::Running && run_id == run_id_) {
      throw Error(ErrorKind::Conflict, "run " + run_id + " is still active");
    }
  }
  std::ifstream in(record_path(run_id), std::ios::binary);
  if (!in) throw Error(ErrorKind::NotFound, "no record for run '" + run_id + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::shared_ptr<Subscription> SessionManager::subscribe() {
  auto sub = std::make_shared<Subscription>(options_.buffer_frames);
  std::lock_guard lock(mu_);
  if (shut_down_) {
    sub->close();
    return sub;
  }
  subscribers_.push_back(sub);
  return sub;
}

void SessionManager::shutdown() {
  try {
    stop_run();
  } catch (const Error&) {
    // no active run
  }
  join_loop_thread();
  std::vector<std::weak_ptr<Subscription>> subs;
  {
    std::lock_guard lock(mu_);
    shut_down_ = true;
    subs.swap(subscribers_);
  }
  for (auto& w : subs) {
    if (auto s = w.lock()) s->close();
  }
}

void SessionManager::publish(const std::string& run_id, const TelemetryFrame& frame) {
  Json msg{{"run_id", run_id}};
  const Json body = frame_to_json(frame);
  for (const auto& [k, v] : body.items()) msg[k] = v;
  const std::string line = msg.dump();

  std::vector<std::shared_ptr<Subscription>> targets;
  {
    std::lock_guard lock(mu_);
    last_frame_ = body;
    ++frame_total_;
    current_setpoint_ = frame.setpoint;
    std::erase_if(subscribers_, [](const auto& w) { return w.expired(); });
    for (auto& w : subscribers_) {
      if (auto s = w.lock()) targets.push_back(std::move(s));
    }
  }
  for (auto& s : targets) s->push(line);
}

void SessionManager::run_loop(ControlLoop loop, std::string run_id) {
  const auto start = Clock::now();
  const double period = loop.config().sample_period;
  while (!loop.finished()) {
    bool stop = false;
    {
      std::lock_guard lock(mu_);
      for (const auto& c : commands_) {
        if (c.kind == Command::Kind::Stop) stop = true;
        else loop.set_setpoint(c.value);
      }
      commands_.clear();
    }
    if (stop) break;
    const TelemetryFrame& frame = loop.step();
    publish(run_id, frame);
    if (options_.time_scale > 0.0 && !loop.finished()) {
      const auto deadline =
          start + std::chrono::duration_cast<Clock::duration>(
                      std::chrono::duration<double>((frame.t + period) / options_.time_scale));
      std::unique_lock lock(mu_);
      cv_.wait_until(lock, deadline, [&] { return stop_requested_; });
    }
  }

  std::string error;
  const std::string path = record_path(run_id);
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (out) out << record_to_json(loop.record()).dump(2) << '\n';
    if (!out) error = path + ": cannot write run record";
  }
  {
    std::lock_guard lock(mu_);
    last_persist_error_ = error;
    phase_ = Phase::Stopped;
    commands_.clear();
  }
  cv_.notify_all();
}

}  // namespace fltc

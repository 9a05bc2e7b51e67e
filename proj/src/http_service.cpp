#include <netdb.h>

#include <charconv>

#include "fltc/error.hpp"
#include "fltc/service.hpp"
#include "httplib.h"

namespace fltc {

namespace {

constexpr auto kStreamPoll = std::chrono::milliseconds(200);

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                Json details = Json::object()) {
  send_json(res, status, Json{{"code", code}, {"message", message}, {"details", std::move(details)}});
}

Json issues_json(const ConfigError& e) {
  Json issues = Json::array();
  for (const auto& i : e.issues()) issues.push_back(Json{{"path", i.path}, {"message", i.message}});
  return Json{{"issues", issues}};
}

}  // namespace

struct HttpService::Impl {
  SessionManager& manager;
  httplib::Server server;

  explicit Impl(SessionManager& m) : manager(m) {
    server.new_task_queue = [] { return new httplib::ThreadPool(16); };
    // The library default adds SO_REUSEPORT, which lets a second server
    // share a port that is already in use.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    route();
  }

  template <typename F>
  void guarded(httplib::Response& res, F&& body) {
    try {
      body();
    } catch (const ConfigError& e) {
      send_error(res, 400, to_string(ErrorKind::InvalidConfig), e.what(), issues_json(e));
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::Conflict:
          send_error(res, 409, to_string(e.kind()), e.what(),
                     Json{{"phase", to_string(manager.phase())}});
          break;
        case ErrorKind::OutOfRange: {
          const auto& o = manager.options();
          send_error(res, 422, to_string(e.kind()), e.what(),
                     Json{{"limits", Json::array({o.setpoint_lo, o.setpoint_hi})}});
          break;
        }
        case ErrorKind::NotFound: send_error(res, 404, to_string(e.kind()), e.what()); break;
        case ErrorKind::InvalidInput: send_error(res, 400, to_string(e.kind()), e.what()); break;
        default: send_error(res, 500, to_string(e.kind()), e.what()); break;
      }
    } catch (const std::exception& e) {
      send_error(res, 500, to_string(ErrorKind::Internal), e.what());
    }
  }

  void route() {
    server.Get("/state", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, manager.state()); });
    });

    server.Post("/runs", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const bool blank = req.body.find_first_not_of(" \t\r\n") == std::string::npos;
        const Json doc = blank ? Json(nullptr) : parse_json_text(req.body, "request body");
        send_json(res, 201, Json{{"run_id", manager.start_run(doc)}});
      });
    });

    server.Post("/runs/current/setpoint", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const Json doc = parse_json_text(req.body, "request body");
        if (!doc.is_object() || !doc.contains("value")) throw ConfigError("/value", "required");
        if (!doc.at("value").is_number()) throw ConfigError("/value", "expected a number");
        const double ack = manager.set_setpoint(doc.at("value").get<double>());
        send_json(res, 200, Json{{"setpoint", ack}});
      });
    });

    server.Post("/runs/current/stop", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, Json{{"run_id", manager.stop_run()}}); });
    });

    server.Get(R"(/runs/([^/]+)/record)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::string id = req.matches[1];
        if (id == "current") {
          const Json s = manager.state();
          if (!s.contains("run_id")) throw Error(ErrorKind::NotFound, "no run has been started");
          id = s.at("run_id").get<std::string>();
        }
        res.status = 200;
        res.set_content(manager.record_text(id), "application/json");
      });
    });

    server.Get("/telemetry", [this](const httplib::Request&, httplib::Response& res) {
      auto sub = manager.subscribe();
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "application/x-ndjson",
          [sub](std::size_t, httplib::DataSink& sink) {
            if (auto msg = sub->next(kStreamPoll)) {
              msg->push_back('\n');
              return sink.write(msg->data(), msg->size());
            }
            if (sub->closed()) {
              sink.done();
              return true;
            }
            return sink.is_writable();
          },
          [sub](bool) { sub->close(); });
    });
  }
};

HttpService::HttpService(SessionManager& manager) : impl_(std::make_unique<Impl>(manager)) {}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &found) != 0) {
    throw Error(ErrorKind::InvalidInput, "cannot resolve listen host '" + host + "'");
  }
  freeaddrinfo(found);
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorKind::Io, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorKind::Io, "cannot bind " + host + ":" + std::to_string(port) + " (address in use?)");
  }
  return port;
}

void HttpService::serve() { impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_) impl_->server.stop();
}

ListenAddress parse_listen_address(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw Error(ErrorKind::InvalidInput, "listen address must be host:port, got '" + text + "'");
  }
  std::string host = text.substr(0, colon);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  const std::string port_text = text.substr(colon + 1);
  int port = -1;
  const auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || end != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    throw Error(ErrorKind::InvalidInput, "invalid port '" + port_text + "'");
  }
  return {host, port};
}

}  // namespace fltc

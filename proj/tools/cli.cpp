#include "cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "fltc/config.hpp"
#include "fltc/demo_room.hpp"
#include "fltc/error.hpp"
#include "fltc/loop.hpp"
#include "fltc/pwm.hpp"
#include "fltc/service.hpp"

namespace fltc::cli {

namespace {

void report(std::ostream& err, const std::string& cmd, const std::exception& e) {
  err << "fltc " << cmd << ": " << e.what() << '\n';
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
    for (const auto& i : ce->issues()) err << "  " << (i.path.empty() ? "/" : i.path) << ": " << i.message << '\n';
  }
}

Json opt_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

/// Writes `text` to `path`, or to `out` when no path was given.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (file) file << text;
  if (!file) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
}

Json canonical_config_doc() {
  Json doc = config_to_json(default_config());
  doc["service"] = service_options_to_json(ServiceOptions{});
  return doc;
}

struct SimulateArgs {
  std::string config;
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
};

int simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  LoopConfig config;
  try {
    config = a.config.empty() ? default_config() : config_from_json(read_json_file(a.config));
    if (a.seed_opt->count() > 0) config.plant.seed = a.seed;
    config.validate();
  } catch (const std::exception& e) {
    report(err, "simulate", e);
    return kUsage;
  }
  try {
    const auto record = run(config);
    write_trace(record, a.format == "json" ? TraceFormat::Json : TraceFormat::Csv, a.out);
    const auto& s = record.summary;
    const Json summary{{"trace", a.out},
                       {"format", a.format},
                       {"seed", config.plant.seed},
                       {"frames", record.frames.size()},
                       {"band", s.band},
                       {"settling_time", opt_number(s.settling_time)},
                       {"overshoot", s.overshoot},
                       {"steady_state_error", opt_number(s.steady_state_error)}};
    out << summary.dump(2) << '\n';
    return kOk;
  } catch (const std::exception& e) {
    report(err, "simulate", e);
    return kRuntime;
  }
}

struct StepArgs {
  std::string controller;
  double error = 0.0;
};

int step(const StepArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<FuzzyController> ctl;
  try {
    ctl = a.controller.empty() ? build_fltc_controller() : controller_from_json(read_json_file(a.controller));
    if (ctl->rulebase().inputs().size() != 1) {
      throw Error(ErrorKind::InvalidInput, "step needs a single-input controller");
    }
    if (!std::isfinite(a.error)) throw Error(ErrorKind::InvalidInput, "--error must be finite");
  } catch (const std::exception& e) {
    report(err, "step", e);
    return kUsage;
  }
  const auto& input = ctl->rulebase().inputs().front();
  const auto trace = ctl->trace({{input.name(), a.error}});
  Json doc = trace_to_json(trace);
  Json notes = Json::array();
  const auto& crisp = trace.inputs.at(input.name());
  if (crisp.clamped()) {
    notes.push_back(input.name() + " " + format_number(crisp.value) + " clamped to " + format_number(crisp.used));
  }
  if (trace.output) {
    const double fan = duty_from_level(*trace.output);
    doc["defuzz"] = *trace.output;
    doc["fan_duty"] = fan;
    doc["heater_duty"] = 1.0 - fan;
  } else {
    notes.push_back("no rule fired");
    doc["defuzz"] = nullptr;
    doc["fan_duty"] = nullptr;
    doc["heater_duty"] = nullptr;
  }
  doc["notes"] = notes;
  out << doc.dump(2) << '\n';
  if (!trace.output) {
    err << "fltc step: no rule fired for " << input.name() << " = " << format_number(a.error) << '\n';
    return kRuntime;
  }
  return kOk;
}

struct CompileArgs {
  std::string rules;
  std::string vocab;
  std::string out;
};

int compile_rules(const CompileArgs& a, std::ostream& out, std::ostream& err) {
  std::string text;
  try {
    const Vocabulary vocab = vocabulary_from_json(read_json_file(a.vocab));
    const bool matrix = a.rules.size() >= 5 && a.rules.substr(a.rules.size() - 5) == ".json";
    const RuleBase rb = matrix ? matrix_to_rules(matrix_from_json(read_json_file(a.rules), vocab), vocab)
                               : parse_rules(read_text_file(a.rules), vocab);
    text = serialize_rulebase(rb);
  } catch (const ParseError& e) {
    err << a.rules << ':' << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    report(err, "compile-rules", e);
    return kUsage;
  }
  try {
    emit(a.out, text, out);
    return kOk;
  } catch (const std::exception& e) {
    report(err, "compile-rules", e);
    return kRuntime;
  }
}

struct ServeArgs {
  std::string config;
  std::string listen = "127.0.0.1:8700";
};

int serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  Json base;
  ServiceOptions options;
  ListenAddress addr;
  try {
    base = a.config.empty() ? canonical_config_doc() : read_json_file(a.config);
    options = service_options_from_json(base);
    const LoopConfig config = config_from_json(base);
    config.validate();
    base = config_to_json(config);
    addr = parse_listen_address(a.listen);
  } catch (const std::exception& e) {
    report(err, "serve", e);
    return kUsage;
  }

  SessionManager manager(options, base);
  HttpService http(manager);
  int port = 0;
  try {
    port = http.bind(addr.host, addr.port);
  } catch (const Error& e) {
    report(err, "serve", e);
    return e.kind() == ErrorKind::InvalidInput ? kUsage : kRuntime;
  }

  // Signals are taken synchronously by a watcher thread; every thread
  // started from here on inherits the blocked mask.
  sigset_t signals;
  sigset_t previous;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, &previous);
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    const timespec poll{0, 100'000'000};
    bool signalled = false;
    while (!done) {
      // stop() is a no-op until the server is listening, so keep asking.
      if (signalled) {
        http.stop();
        nanosleep(&poll, nullptr);
      } else if (sigtimedwait(&signals, nullptr, &poll) > 0) {
        signalled = true;
      }
    }
  });

  out << "listening on http://" << addr.host << ':' << port << std::endl;
  http.serve();
  done = true;
  watcher.join();

  const Json state = manager.state();
  manager.shutdown();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  if (state.contains("run_id")) {
    out << "record: " << manager.record_path(state.at("run_id").get<std::string>()) << std::endl;
  }
  return kOk;
}

int default_config_cmd(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    emit(path, canonical_config_doc().dump(2) + "\n", out);
    return kOk;
  } catch (const std::exception& e) {
    report(err, "default-config", e);
    return kRuntime;
  }
}

int demo_room(double temperature, double target, std::ostream& out, std::ostream& err) {
  try {
    const auto d = room::decide(temperature, target);
    Json commands = Json::object();
    for (const auto& [name, w] : d.commands) commands[name] = w;
    const Json doc{{"temperature", temperature},
                   {"target", target},
                   {"command", d.command},
                   {"degree", d.degree},
                   {"commands", commands}};
    out << doc.dump(2) << '\n';
    return kOk;
  } catch (const std::exception& e) {
    report(err, "demo-room", e);
    return kUsage;
  }
}

struct PwmArgs {
  double duty = 0.0;
  double level = 0.0;
  CLI::Option* duty_opt = nullptr;
  int resolution = 100;
  double period = 1.0;
  std::string out;
};

int pwm(const PwmArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<bool> wave;
  try {
    const double duty = a.duty_opt->count() > 0 ? a.duty : duty_from_level(a.level);
    wave = synthesize(PwmCommand(duty, a.period, a.resolution));
  } catch (const std::exception& e) {
    report(err, "pwm", e);
    return kUsage;
  }
  try {
    std::ostringstream csv;
    write_waveform_csv(wave, csv);
    emit(a.out, csv.str(), out);
    return kOk;
  } catch (const std::exception& e) {
    report(err, "pwm", e);
    return kRuntime;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fuzzy-logic temperature control toolkit", "fltc"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the closed loop and write its trace");
  sim_cmd->add_option("--config", sim.config, "Run configuration JSON (default: built-in)");
  sim_cmd->add_option("--out", sim.out, "Trace destination")->required();
  sim_cmd->add_option("--format", sim.format, "Trace format")->check(CLI::IsMember({"csv", "json"}));
  sim.seed_opt = sim_cmd->add_option("--seed", sim.seed, "Override plant.seed");

  StepArgs st;
  auto* step_cmd = app.add_subcommand("step", "Evaluate the controller once and print the trace");
  step_cmd->add_option("--controller", st.controller, "Controller JSON (default: built-in)");
  step_cmd->add_option("--error", st.error, "Setpoint minus sensed temperature, degC")->required();

  CompileArgs cr;
  auto* compile_cmd = app.add_subcommand("compile-rules", "Validate rules and print them in canonical form");
  compile_cmd->add_option("--rules", cr.rules, "Rule text (.frl) or rule matrix (.json)")->required();
  compile_cmd->add_option("--vocab", cr.vocab, "Vocabulary JSON")->required();
  compile_cmd->add_option("--out", cr.out, "Destination (default: stdout)");

  ServeArgs sv;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the control loop over HTTP");
  serve_cmd->add_option("--config", sv.config, "Run configuration JSON (default: built-in)");
  serve_cmd->add_option("--listen", sv.listen, "host:port")->capture_default_str();

  std::string dc_out;
  auto* dc_cmd = app.add_subcommand("default-config", "Print the canonical run configuration");
  dc_cmd->add_option("--out", dc_out, "Destination (default: stdout)");

  double temperature = 0.0;
  double target = 0.0;
  auto* room_cmd = app.add_subcommand("demo-room", "Room-heating demo over the 5x5 rule matrix");
  room_cmd->add_option("--temperature", temperature, "Room temperature, degC in [0, 40]")->required();
  room_cmd->add_option("--target", target, "Target temperature, degC in [0, 40]")->required();

  PwmArgs pw;
  auto* pwm_cmd = app.add_subcommand("pwm", "Write a PWM waveform as CSV");
  pw.duty_opt = pwm_cmd->add_option("--duty", pw.duty, "Duty cycle in [0, 1]");
  auto* level_opt = pwm_cmd->add_option("--level", pw.level, "Controller output level in [0, 255]");
  pw.duty_opt->excludes(level_opt);
  pwm_cmd->add_option("--resolution", pw.resolution, "Slots per period")->capture_default_str();
  pwm_cmd->add_option("--period", pw.period, "Period, s")->capture_default_str();
  pwm_cmd->add_option("--out", pw.out, "Destination (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  if (pwm_cmd->parsed() && pw.duty_opt->count() == 0 && level_opt->count() == 0) {
    err << "fltc pwm: one of --duty or --level is required\n";
    return kUsage;
  }

  if (sim_cmd->parsed()) return simulate(sim, out, err);
  if (step_cmd->parsed()) return step(st, out, err);
  if (compile_cmd->parsed()) return compile_rules(cr, out, err);
  if (serve_cmd->parsed()) return serve(sv, out, err);
  if (dc_cmd->parsed()) return default_config_cmd(dc_out, out, err);
  if (room_cmd->parsed()) return demo_room(temperature, target, out, err);
  if (pwm_cmd->parsed()) return pwm(pw, out, err);
  return kUsage;
}

}  // namespace fltc::cli

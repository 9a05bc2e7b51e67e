#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fltc/config.hpp"
#include "fltc/demo_room.hpp"
#include "fltc/error.hpp"
#include "fltc/loop.hpp"
#include "fltc/plant.hpp"
#include "fltc/pwm.hpp"

namespace py = pybind11;
using namespace fltc;

namespace {

// Documents cross the boundary as JSON text; the Python package decodes them.
Json parse_doc(const std::string& text, const char* what) { return parse_json_text(text, what); }

FuzzyController controller_from_text(const std::optional<std::string>& text) {
  return text ? controller_from_json(parse_doc(*text, "controller")) : build_fltc_controller();
}

std::string simulate(const std::optional<std::string>& config, const std::string& format,
                     std::optional<std::uint64_t> seed) {
  LoopConfig c = config ? config_from_json(parse_doc(*config, "config")) : default_config();
  if (seed) c.plant.seed = *seed;
  if (format != "csv" && format != "json") throw Error(ErrorKind::InvalidInput, "format must be csv or json");
  std::ostringstream out;
  write_trace(run(c), format == "json" ? TraceFormat::Json : TraceFormat::Csv, out);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_fltc, m) {
  m.doc() = "Fuzzy-logic temperature control core";

  static py::exception<Error> error(m, "FltcError");
  static py::exception<ConfigError> config_error(m, "ConfigError", error.ptr());
  static py::exception<ParseError> parse_error(m, "RuleParseError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::list issues;
      for (const auto& i : e.issues()) issues.append(py::make_tuple(i.path, i.message));
      py::object exc = py::handle(config_error.ptr())(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      exc.attr("issues") = issues;
      PyErr_SetObject(config_error.ptr(), exc.ptr());
    } catch (const ParseError& e) {
      py::object exc = py::handle(parse_error.ptr())(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      exc.attr("line") = e.line();
      exc.attr("column") = e.column();
      PyErr_SetObject(parse_error.ptr(), exc.ptr());
    } catch (const Error& e) {
      py::object exc = py::handle(error.ptr())(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("fuzzify", [](const std::string& variable, double x) {
    std::map<std::string, double> out;
    for (const auto& [term, d] : fuzzify(variable_from_json(parse_doc(variable, "variable")), x)) out[term] = d;
    return out;
  }, py::arg("variable"), py::arg("x"));

  m.def("fltc_controller_json", [] { return controller_to_json(build_fltc_controller()).dump(); });

  m.def("compile_rules", [](const std::string& source, const std::string& vocabulary) {
    return serialize_rulebase(parse_rules(source, vocabulary_from_json(parse_doc(vocabulary, "vocabulary"))));
  }, py::arg("source"), py::arg("vocabulary"));

  m.def("compile_matrix", [](const std::string& matrix, const std::string& vocabulary) {
    const auto vocab = vocabulary_from_json(parse_doc(vocabulary, "vocabulary"));
    return serialize_rulebase(matrix_to_rules(matrix_from_json(parse_doc(matrix, "matrix"), vocab), vocab));
  }, py::arg("matrix"), py::arg("vocabulary"));

  m.def("trace", [](const std::map<std::string, double>& inputs, const std::optional<std::string>& controller) {
    return trace_to_json(controller_from_text(controller).trace(inputs)).dump();
  }, py::arg("inputs"), py::arg("controller") = py::none());

  m.def("infer", [](const std::map<std::string, double>& inputs, const std::optional<std::string>& controller) {
    return *controller_from_text(controller).infer(inputs).output;
  }, py::arg("inputs"), py::arg("controller") = py::none());

  m.def("duty_from_level", &duty_from_level, py::arg("level"));

  m.def("synthesize_pwm", [](double duty, int resolution, double period) {
    return synthesize(PwmCommand(duty, period, resolution));
  }, py::arg("duty"), py::arg("resolution"), py::arg("period") = 1.0);

  m.def("equilibrium_temp", [](double heater, double fan, const std::optional<std::string>& plant) {
    const PlantParams p = plant ? plant_from_json(parse_doc(*plant, "plant")) : PlantParams{};
    return equilibrium_temp(p, heater, fan);
  }, py::arg("heater_duty"), py::arg("fan_duty"), py::arg("plant") = py::none());

  m.def("default_config_json", [] { return config_to_json(default_config()).dump(); });

  m.def("simulate", &simulate, py::arg("config") = py::none(), py::arg("format") = "csv",
        py::arg("seed") = py::none());

  m.def("demo_room", [](double temperature, double target) {
    const auto d = room::decide(temperature, target);
    return py::make_tuple(d.command, d.degree, d.commands);
  }, py::arg("temperature"), py::arg("target"));
}

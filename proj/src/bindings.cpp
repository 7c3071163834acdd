#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "memlab/checkers.hpp"
#include "memlab/io.hpp"
#include "memlab/machine.hpp"
#include "memlab/parser.hpp"
#include "memlab/seplog.hpp"

namespace py = pybind11;

namespace {

using namespace memlab;

std::string run_program(const std::string& text, const std::string& state_json,
                        std::uint64_t fuel, const std::string& config_json) {
  CmdPtr c = parse_program(text);
  State s = state_json.empty() ? State{}
                               : state_from_json(json::parse(state_json));
  SafetyConfig cfg = config_json.empty()
                         ? SafetyConfig::strict()
                         : config_from_json(json::parse(config_json));
  OutcomePlus out = relaxed::eval_cmd_plus(*c, s, fuel, cfg);
  json j;
  switch (out.kind) {
    case OutcomeKind::Done: j["outcome"] = "done"; break;
    case OutcomeKind::Error: j["outcome"] = "error"; break;
    case OutcomeKind::OutOfFuel: j["outcome"] = "out-of-fuel"; break;
  }
  if (out.kind == OutcomeKind::Done) j["state"] = state_to_json(out.state);
  return j.dump();
}

std::string pretty_program(const std::string& text) {
  return pretty(*parse_program(text));
}

std::string pretty_assertion(const std::string& text) {
  return pretty(*parse_assertion(text));
}

std::string triple(const std::string& pre, const std::string& cmd,
                   const std::string& post, const std::string& mode_name,
                   std::uint64_t samples, std::uint64_t fuel,
                   std::uint64_t seed) {
  TripleMode mode = mode_name == "strict" ? TripleMode::Strict
                                          : TripleMode::ErrTolerant;
  TripleVerdict v = check_triple(*parse_assertion(pre), *parse_program(cmd),
                                 *parse_assertion(post), mode, samples, fuel,
                                 seed);
  json j;
  switch (v.kind) {
    case TripleVerdict::NoCounterexample: j["verdict"] = "no-counterexample"; break;
    case TripleVerdict::Counterexample: j["verdict"] = "counterexample"; break;
    case TripleVerdict::GeneratorFailed: j["verdict"] = "generator-failed"; break;
    case TripleVerdict::PremiseFailed: j["verdict"] = "premise-failed"; break;
  }
  j["trials"] = v.trials;
  if (v.kind == TripleVerdict::Counterexample)
    j["state"] = state_to_json(v.state);
  return j.dump();
}

std::string campaign(const std::string& theorem, const std::string& config_json,
                     std::uint64_t trials, std::uint64_t seed,
                     std::uint64_t fuel, unsigned jobs) {
  SafetyConfig cfg = config_json.empty()
                         ? SafetyConfig::strict()
                         : config_from_json(json::parse(config_json));
  GenParams params;
  params.trials = trials;
  params.seed = seed;
  params.fuel = fuel;
  return report_to_json(run_campaign(theorem, cfg, params, jobs)).dump();
}

std::string hunt_violation(const std::string& theorem,
                           const std::string& config_json, std::uint64_t trials,
                           std::uint64_t seed, std::uint64_t fuel) {
  SafetyConfig cfg = config_from_json(json::parse(config_json));
  GenParams params;
  params.trials = trials;
  params.seed = seed;
  params.fuel = fuel;
  return report_to_json(hunt(theorem, cfg, params)).dump();
}

std::string machine_run(const std::string& state_json, std::uint64_t steps) {
  MachineState ms = machine_from_json(json::parse(state_json));
  std::uint64_t taken = 0;
  std::optional<MachineState> fin = run_steps(ms, steps, &taken);
  json j;
  j["steps"] = taken;
  j["stuck"] = taken < steps;
  j["state"] = machine_to_json(*fin);
  return j.dump();
}

std::vector<std::uint64_t> assemble_words(const std::string& text) {
  return assemble(text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "interpreter and property-testing lab for a block/offset memory "
            "model; JSON strings in, JSON strings out";
  m.attr("__version__") = kVersion;
  m.def("run_program", &run_program, py::arg("text"), py::arg("state") = "",
        py::arg("fuel") = 256, py::arg("config") = "",
        "parse and run a program; returns the outcome as JSON");
  m.def("pretty_program", &pretty_program, py::arg("text"),
        "parse a program and return its canonical rendering");
  m.def("pretty_assertion", &pretty_assertion, py::arg("text"),
        "parse an assertion and return its canonical rendering");
  m.def("check_triple", &triple, py::arg("pre"), py::arg("cmd"),
        py::arg("post"), py::arg("mode") = "strict", py::arg("samples") = 200,
        py::arg("fuel") = 256, py::arg("seed") = 0,
        "sample-check a triple; returns the verdict as JSON");
  m.def("run_campaign", &campaign, py::arg("theorem"), py::arg("config") = "",
        py::arg("trials") = 1000, py::arg("seed") = 0, py::arg("fuel") = 256,
        py::arg("jobs") = 1, "run a theorem campaign; returns the report JSON");
  m.def("hunt", &hunt_violation, py::arg("theorem"), py::arg("config"),
        py::arg("trials") = 1000, py::arg("seed") = 0, py::arg("fuel") = 256,
        "search for a violation under a relaxed configuration");
  m.def("machine_run", &machine_run, py::arg("state"), py::arg("steps") = 1000,
        "run the abstract machine from a JSON state");
  m.def("assemble", &assemble_words, py::arg("text"),
        "assemble machine code; returns encoded instruction words");
  m.def("known_theorems", [] { return known_theorems(); },
        "names accepted by run_campaign and hunt");
}

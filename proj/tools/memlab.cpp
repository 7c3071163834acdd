#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "memlab/checkers.hpp"
#include "memlab/io.hpp"
#include "memlab/machine.hpp"
#include "memlab/parser.hpp"
#include "memlab/seplog.hpp"

namespace {

using namespace memlab;

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

// Shared relaxation flags; --relax key[=value] tokens are accepted too so
// configurations can be spelled compactly.
struct ConfigFlags {
  bool casts = false;
  bool forge = false;
  bool uninit = false;
  std::string freshness = "all";
  std::int64_t mem_limit = -1;
  std::string oom = "halt";
  std::string ptr_eq = "structural";
  std::vector<std::string> relax;

  void add_to(CLI::App* app) {
    app->add_flag("--casts", casts, "enable pointer-to-integer casts");
    app->add_flag("--forge", forge, "enable pointer forging");
    app->add_flag("--uninit", uninit, "recycle freed cell contents");
    app->add_option("--freshness", freshness,
                    "allocator id policy: all | blocks | mod:K");
    app->add_option("--mem-limit", mem_limit, "total live-cell limit");
    app->add_option("--oom", oom, "behavior at the limit: halt | nil");
    app->add_option("--ptr-eq", ptr_eq,
                    "pointer equality: structural | physical");
    app->add_option("--relax", relax,
                    "relaxations as key[=value] tokens, e.g. freshness=blocks");
  }

  SafetyConfig build() const {
    json j;
    j["casts"] = casts;
    j["forging"] = forge;
    j["uninit_memory"] = uninit;
    j["freshness"] = freshness;
    if (mem_limit >= 0) j["memory_limit"] = mem_limit;
    j["oom_mode"] = oom;
    j["pointer_eq"] = ptr_eq;
    SafetyConfig cfg = config_from_json(j);
    for (const std::string& token : relax) apply_relax(cfg, token);
    return cfg;
  }

  static void apply_relax(SafetyConfig& cfg, const std::string& token) {
    std::string key = token, value;
    if (auto eq = token.find('='); eq != std::string::npos) {
      key = token.substr(0, eq);
      value = token.substr(eq + 1);
    }
    if (key == "casts") cfg.casts = true;
    else if (key == "forge" || key == "forging") cfg.forging = true;
    else if (key == "uninit") {
      cfg.uninit_memory = true;
      // Recycled contents are only observable when ids can be reused.
      if (cfg.freshness.kind == FreshnessMode::FreshAll)
        cfg.freshness.kind = FreshnessMode::FreshBlocksOnly;
    } else if (key == "freshness") {
      json j = config_to_json(cfg);
      j["freshness"] = value;
      cfg = config_from_json(j);
    } else if (key == "mem-limit") {
      cfg.memory_limit = std::stoull(value);
    } else if (key == "oom") {
      cfg.oom_mode = value == "nil" ? OomMode::ReturnNil : OomMode::HaltError;
    } else if (key == "ptr-eq") {
      cfg.pointer_eq = value == "physical" ? PtrEqMode::PhysicalAddress
                                           : PtrEqMode::Structural;
    } else {
      throw std::runtime_error("unknown relaxation '" + token + "'");
    }
  }
};

const char* outcome_name(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Done: return "done";
    case OutcomeKind::Error: return "error";
    case OutcomeKind::OutOfFuel: return "out-of-fuel";
  }
  return "?";
}

int cmd_run(const std::string& file, bool from_stdin,
            const std::string& state_file, Fuel fuel, bool trace,
            const ConfigFlags& flags) {
  SafetyConfig cfg = flags.build();
  std::string text = from_stdin ? read_file("-") : read_file(file);
  CmdPtr c = parse_program(text);
  State s;
  if (!state_file.empty()) s = state_from_json(json::parse(read_file(state_file)));

  if (cfg.is_strict() && uses_gated_exprs(*c))
    std::cerr << "warning: program uses cast/forge, which evaluate to nil "
                 "under the strict configuration\n";

  RunContext ctx = make_run_context(s);
  relaxed::TraceFn tracer = [](const std::string& path, OutcomeKind kind) {
    std::cerr << "trace " << (path.empty() ? "/" : path) << " "
              << outcome_name(kind) << "\n";
  };
  OutcomePlus out =
      relaxed::eval_cmd_plus(*c, s, fuel, cfg, ctx, trace ? &tracer : nullptr);

  json j;
  j["outcome"] = outcome_name(out.kind);
  if (out.kind == OutcomeKind::Done) {
    j["state"] = state_to_json(out.state);
    json allocated = json::array();
    for (BlockId id : out.allocated) allocated.push_back(id);
    j["allocated"] = allocated;
  }
  std::cout << j.dump(2) << "\n";
  return out.kind == OutcomeKind::Error ? 1 : 0;
}

void require_theorem(const std::string& name) {
  const auto& known = known_theorems();
  if (std::find(known.begin(), known.end(), name) == known.end()) {
    std::string msg = "unknown theorem '" + name + "'; known:";
    for (const std::string& k : known) msg += " " + k;
    throw std::runtime_error(msg);
  }
}

int emit_report(const CheckReport& report, const std::string& out_path) {
  write_output(out_path, report_to_json(report).dump(2) + "\n");
  return report.violations.empty() ? 0 : 1;
}

int cmd_check(const std::string& theorem, std::uint64_t trials,
              std::uint64_t seed, Fuel fuel, unsigned jobs,
              const std::string& out_path, const ConfigFlags& flags) {
  require_theorem(theorem);
  GenParams params;
  params.trials = trials;
  params.seed = seed;
  params.fuel = fuel;
  return emit_report(run_campaign(theorem, flags.build(), params, jobs), out_path);
}

int cmd_hunt(const std::string& theorem, std::uint64_t trials,
             std::uint64_t seed, Fuel fuel, const std::string& out_path,
             const ConfigFlags& flags) {
  require_theorem(theorem);
  GenParams params;
  params.trials = trials;
  params.seed = seed;
  params.fuel = fuel;
  return emit_report(hunt(theorem, flags.build(), params), out_path);
}

int cmd_triple(const std::string& pre, const std::string& cmd,
               const std::string& post, const std::string& mode_name,
               bool mode_given, std::uint64_t samples, Fuel fuel,
               std::uint64_t seed, const std::string& frame,
               const std::string& rule_name, const ConfigFlags& flags) {
  AssertPtr p = parse_assertion(pre);
  AssertPtr q = parse_assertion(post);
  CmdPtr c = parse_program(cmd);
  TripleMode mode;
  if (mode_name == "strict") mode = TripleMode::Strict;
  else if (mode_name == "err-tolerant" || mode_name == "err")
    mode = TripleMode::ErrTolerant;
  else throw std::runtime_error("unknown mode '" + mode_name + "'");

  TripleVerdict v;
  if (frame.empty()) {
    v = check_triple(*p, *c, *q, mode, samples, fuel, seed, flags.build());
  } else {
    AssertPtr r = parse_assertion(frame);
    FrameRule rule;
    if (rule_name == "frame") rule = FrameRule::Frame;
    else if (rule_name == "safe-frame") rule = FrameRule::SafeFrame;
    else throw std::runtime_error("unknown rule '" + rule_name + "'");
    // --mode normally only applies to plain triples; when given alongside
    // --frame it overrides the rule's native mode (e.g. frame over
    // err-tolerant triples, the unsound combination).
    std::optional<TripleMode> override_mode;
    if (mode_given) override_mode = mode;
    v = frame_experiment(*p, *c, *q, *r, rule, samples, fuel, seed,
                         override_mode);
  }

  json j;
  j["trials"] = v.trials;
  j["seed"] = seed;
  switch (v.kind) {
    case TripleVerdict::NoCounterexample: j["verdict"] = "no-counterexample"; break;
    case TripleVerdict::Counterexample: j["verdict"] = "counterexample"; break;
    case TripleVerdict::GeneratorFailed: j["verdict"] = "generator-failed"; break;
    case TripleVerdict::PremiseFailed: j["verdict"] = "premise-failed"; break;
  }
  if (!v.detail.empty()) j["detail"] = v.detail;
  if (v.kind == TripleVerdict::Counterexample) {
    j["state"] = state_to_json(v.state);
    j["outcome"] = outcome_name(v.outcome);
    if (v.outcome == OutcomeKind::Done)
      j["final_state"] = state_to_json(v.final_state);
  }
  std::cout << j.dump(2) << "\n";
  return v.kind == TripleVerdict::Counterexample ? 1 : 0;
}

int cmd_machine(const std::string& program, std::uint64_t steps,
                const std::string& check, std::uint64_t trials,
                std::uint64_t seed, const std::string& out_path) {
  if (!check.empty()) {
    require_theorem(check);
    GenParams params;
    params.trials = trials;
    params.seed = seed;
    return emit_report(
        run_campaign(check, SafetyConfig::strict(), params, 1), out_path);
  }
  if (program.empty())
    throw std::runtime_error("machine needs --program or --check");
  std::string text = read_file(program);
  MachineState ms;
  if (program.size() > 5 && program.substr(program.size() - 5) == ".json") {
    ms = machine_from_json(json::parse(text));
  } else {
    std::vector<Word> code = assemble(text);
    std::vector<MValue> cells;
    for (Word w : code) cells.push_back(MValue::w(w));
    ms.mem[1] = std::move(cells);
    for (std::size_t i = 0; i < kNumRegs; ++i) ms.regs[i] = MValue::w(0);
    ms.pc = MValue::p(1, 0);
  }
  std::uint64_t taken = 0;
  std::optional<MachineState> fin = run_steps(ms, steps, &taken);
  json j;
  j["steps"] = taken;
  j["stuck"] = taken < steps;
  j["state"] = machine_to_json(*fin);
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interpreter and property-testing lab for a block/offset "
               "memory model"};
  app.require_subcommand(1);

  ConfigFlags run_flags, check_flags, hunt_flags, triple_flags;

  // run
  auto* run = app.add_subcommand("run", "run a program and print the result");
  std::string run_file, run_state;
  bool run_stdin = false, run_trace = false;
  std::uint64_t run_fuel = 256;
  run->add_option("file", run_file, "program file");
  run->add_flag("--stdin", run_stdin, "read the program from standard input");
  run->add_option("--state", run_state, "initial state JSON file");
  run->add_option("--fuel", run_fuel, "while-loop unfolding budget");
  run->add_flag("--trace", run_trace, "log each executed command to stderr");
  run_flags.add_to(run);

  // check
  auto* check = app.add_subcommand("check", "run a theorem campaign");
  std::string check_theorem, check_out;
  std::uint64_t check_trials = 1000, check_seed = 0, check_fuel = 256;
  unsigned check_jobs = 1;
  check->add_option("--theorem", check_theorem, "theorem name")->required();
  check->add_option("--trials", check_trials, "number of trials");
  check->add_option("--seed", check_seed, "campaign seed");
  check->add_option("--fuel", check_fuel, "while-loop unfolding budget");
  check->add_option("--jobs", check_jobs, "worker threads");
  check->add_option("--out", check_out, "write the report JSON here");
  check_flags.add_to(check);

  // hunt
  auto* huntc = app.add_subcommand(
      "hunt", "search for a violation under a relaxed configuration");
  std::string hunt_theorem, hunt_out;
  std::uint64_t hunt_trials = 1000, hunt_seed = 0, hunt_fuel = 256;
  huntc->add_option("--theorem", hunt_theorem, "theorem name")->required();
  huntc->add_option("--trials", hunt_trials, "trial budget");
  huntc->add_option("--seed", hunt_seed, "hunt seed");
  huntc->add_option("--fuel", hunt_fuel, "while-loop unfolding budget");
  huntc->add_option("--out", hunt_out, "write the report JSON here");
  hunt_flags.add_to(huntc);

  // triple (check-triple kept as an alias)
  auto* triple = app.add_subcommand("triple", "sample-check a triple");
  triple->alias("check-triple");
  std::string t_pre, t_cmd, t_post, t_mode = "strict", t_frame, t_rule = "frame";
  std::uint64_t t_samples = 200, t_seed = 0, t_fuel = 256;
  triple->add_option("--pre", t_pre, "precondition assertion")->required();
  triple->add_option("--cmd", t_cmd, "program text")->required();
  triple->add_option("--post", t_post, "postcondition assertion")->required();
  triple->add_option("--mode", t_mode, "strict | err-tolerant");
  triple->add_option("--samples", t_samples, "precondition samples");
  triple->add_option("--seed", t_seed, "sampling seed");
  triple->add_option("--fuel", t_fuel, "while-loop unfolding budget");
  triple->add_option("--frame", t_frame,
                     "frame assertion; runs the frame experiment");
  triple->add_option("--rule", t_rule, "frame | safe-frame");
  triple_flags.add_to(triple);

  // machine
  auto* machine = app.add_subcommand("machine", "drive the abstract machine");
  std::string m_program, m_check, m_out;
  std::uint64_t m_steps = 1000, m_trials = 1000, m_seed = 0;
  machine->add_option("--program", m_program,
                      "assembly file, or machine-state JSON (*.json)");
  machine->add_option("--steps", m_steps, "step budget");
  machine->add_option("--check", m_check, "run a machine theorem campaign");
  machine->add_option("--trials", m_trials, "campaign trials");
  machine->add_option("--seed", m_seed, "campaign seed");
  machine->add_option("--out", m_out, "write the report JSON here");

  // report
  auto* report = app.add_subcommand("report", "render a report JSON as text");
  std::string r_file;
  report->add_option("file", r_file, "report JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed())
      return cmd_run(run_file, run_stdin, run_state, run_fuel, run_trace,
                     run_flags);
    if (check->parsed())
      return cmd_check(check_theorem, check_trials, check_seed, check_fuel,
                       check_jobs, check_out, check_flags);
    if (huntc->parsed())
      return cmd_hunt(hunt_theorem, hunt_trials, hunt_seed, hunt_fuel, hunt_out,
                      hunt_flags);
    if (triple->parsed())
      return cmd_triple(t_pre, t_cmd, t_post, t_mode,
                        triple->count("--mode") > 0, t_samples, t_fuel, t_seed,
                        t_frame, t_rule, triple_flags);
    if (machine->parsed())
      return cmd_machine(m_program, m_steps, m_check, m_trials, m_seed, m_out);
    if (report->parsed()) {
      std::cout << memlab::render_report(
          memlab::json::parse(read_file(r_file)));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

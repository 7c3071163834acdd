#include "memlab/io.hpp"

#include <limits>
#include <sstream>

namespace memlab {

namespace {

json int_to_json(const Int& n) {
  static const Int lo = Int(std::numeric_limits<std::int64_t>::min());
  static const Int hi = Int(std::numeric_limits<std::int64_t>::max());
  if (n >= lo && n <= hi) return static_cast<std::int64_t>(n);
  return n.str();
}

Int int_from_json(const json& j) {
  if (j.is_number_integer()) return Int(j.get<std::int64_t>());
  if (j.is_number_unsigned()) return Int(j.get<std::uint64_t>());
  if (j.is_string()) return Int(j.get<std::string>());
  throw std::runtime_error("expected integer or decimal string");
}

}  // namespace

json value_to_json(const Value& v) {
  if (v.is_int()) return json{{"int", int_to_json(v.int_val())}};
  if (v.is_bool()) return json{{"bool", v.bool_val()}};
  if (v.is_nil()) return json("nil");
  return json{{"ptr", json::array({v.ptr_val().block,
                                   int_to_json(v.ptr_val().offset)})}};
}

Value value_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "nil") return Value::nil();
  if (j.is_object()) {
    if (j.contains("int")) return Value::integer(int_from_json(j.at("int")));
    if (j.contains("bool")) return Value::boolean(j.at("bool").get<bool>());
    if (j.contains("ptr")) {
      const json& p = j.at("ptr");
      if (p.is_array() && p.size() == 2)
        return Value::pointer(p.at(0).get<BlockId>(), int_from_json(p.at(1)));
    }
  }
  throw std::runtime_error("malformed value: " + j.dump());
}

json state_to_json(const State& s) {
  json store = json::object();
  for (const auto& [x, v] : s.store) store[x] = value_to_json(v);
  json heap = json::array();
  for (const auto& [k, v] : s.heap)
    heap.push_back(json::array(
        {k.block, int_to_json(k.offset), value_to_json(v)}));
  return json{{"store", store}, {"heap", heap}};
}

State state_from_json(const json& j) {
  State s;
  if (j.contains("store"))
    for (const auto& [x, v] : j.at("store").items())
      s.store[x] = value_from_json(v);
  if (j.contains("heap"))
    for (const json& cell : j.at("heap")) {
      if (!cell.is_array() || cell.size() != 3)
        throw std::runtime_error("malformed heap cell: " + cell.dump());
      s.heap[HeapKey{cell.at(0).get<BlockId>(), int_from_json(cell.at(1))}] =
          value_from_json(cell.at(2));
    }
  return s;
}

json config_to_json(const SafetyConfig& cfg) {
  json j;
  j["casts"] = cfg.casts;
  j["forging"] = cfg.forging;
  j["uninit_memory"] = cfg.uninit_memory;
  switch (cfg.freshness.kind) {
    case FreshnessMode::FreshAll: j["freshness"] = "all"; break;
    case FreshnessMode::FreshBlocksOnly: j["freshness"] = "blocks"; break;
    case FreshnessMode::ModK:
      j["freshness"] = "mod:" + std::to_string(cfg.freshness.k);
      break;
  }
  if (cfg.memory_limit)
    j["memory_limit"] = *cfg.memory_limit;
  else
    j["memory_limit"] = nullptr;
  j["oom_mode"] = cfg.oom_mode == OomMode::HaltError ? "halt" : "nil";
  j["pointer_eq"] =
      cfg.pointer_eq == PtrEqMode::Structural ? "structural" : "physical";
  return j;
}

SafetyConfig config_from_json(const json& j) {
  SafetyConfig cfg;
  cfg.casts = j.value("casts", false);
  cfg.forging = j.value("forging", false);
  cfg.uninit_memory = j.value("uninit_memory", false);
  std::string freshness = j.value("freshness", "all");
  if (freshness == "all") {
    cfg.freshness.kind = FreshnessMode::FreshAll;
  } else if (freshness == "blocks") {
    cfg.freshness.kind = FreshnessMode::FreshBlocksOnly;
  } else if (freshness.rfind("mod:", 0) == 0) {
    cfg.freshness.kind = FreshnessMode::ModK;
    cfg.freshness.k = std::stoull(freshness.substr(4));
    if (cfg.freshness.k == 0)
      throw std::runtime_error("freshness mod requires k >= 1");
  } else {
    throw std::runtime_error("unknown freshness mode '" + freshness + "'");
  }
  if (j.contains("memory_limit") && !j.at("memory_limit").is_null())
    cfg.memory_limit = j.at("memory_limit").get<std::uint64_t>();
  cfg.oom_mode =
      j.value("oom_mode", "halt") == "nil" ? OomMode::ReturnNil : OomMode::HaltError;
  cfg.pointer_eq = j.value("pointer_eq", "structural") == "physical"
                       ? PtrEqMode::PhysicalAddress
                       : PtrEqMode::Structural;
  return cfg;
}

json report_to_json(const CheckReport& r) {
  json violations = json::array();
  for (const Violation& v : r.violations) {
    violations.push_back(json{{"seed", v.seed},
                              {"program", v.program},
                              {"states", v.states},
                              {"detail", v.detail}});
  }
  return json{{"theorem", r.theorem},
              {"config", config_to_json(r.config)},
              {"trials", r.trials},
              {"applicable", r.applicable},
              {"violations", violations},
              {"seed", r.seed},
              {"version", kVersion},
              {"wall_seconds", r.wall_seconds}};
}

std::string render_report(const json& j) {
  std::ostringstream os;
  os << "theorem:    " << j.value("theorem", "?") << "\n";
  os << "seed:       " << j.value("seed", std::uint64_t(0)) << "\n";
  os << "trials:     " << j.value("trials", std::uint64_t(0)) << "\n";
  os << "applicable: " << j.value("applicable", std::uint64_t(0)) << "\n";
  if (j.contains("config")) os << "config:     " << j.at("config").dump() << "\n";
  const json& violations = j.contains("violations") ? j.at("violations")
                                                    : json::array();
  os << "violations: " << violations.size() << "\n";
  for (const json& v : violations) {
    os << "  - seed " << v.value("seed", std::uint64_t(0)) << ": "
       << v.value("detail", "") << "\n";
    if (!v.value("program", std::string()).empty())
      os << "    program: " << v.at("program").get<std::string>() << "\n";
    if (v.contains("states"))
      for (const json& s : v.at("states"))
        os << "    state:   " << s.get<std::string>() << "\n";
  }
  return os.str();
}

json mvalue_to_json(const MValue& v) {
  if (v.is_word()) return json{{"word", v.word}};
  return json{{"ptr", json::array({v.ptr.block, v.ptr.offset})}};
}

MValue mvalue_from_json(const json& j) {
  if (j.is_object()) {
    if (j.contains("word")) return MValue::w(j.at("word").get<Word>());
    if (j.contains("ptr")) {
      const json& p = j.at("ptr");
      if (p.is_array() && p.size() == 2)
        return MValue::p(p.at(0).get<BlockId>(), p.at(1).get<Word>());
    }
  }
  throw std::runtime_error("malformed machine value: " + j.dump());
}

json machine_to_json(const MachineState& ms) {
  json blocks = json::object();
  for (const auto& [id, cells] : ms.mem) {
    json arr = json::array();
    for (const MValue& v : cells) arr.push_back(mvalue_to_json(v));
    blocks[std::to_string(id)] = std::move(arr);
  }
  json regs = json::object();
  for (std::size_t i = 0; i < kNumRegs; ++i)
    regs[reg_name(static_cast<Reg>(i))] = mvalue_to_json(ms.regs[i]);
  return json{{"blocks", blocks}, {"regs", regs}, {"pc", mvalue_to_json(ms.pc)}};
}

MachineState machine_from_json(const json& j) {
  MachineState ms;
  for (std::size_t i = 0; i < kNumRegs; ++i) ms.regs[i] = MValue::w(0);
  if (j.contains("blocks"))
    for (const auto& [key, cells] : j.at("blocks").items()) {
      std::vector<MValue> block;
      for (const json& v : cells) block.push_back(mvalue_from_json(v));
      ms.mem[std::stoull(key)] = std::move(block);
    }
  if (j.contains("regs"))
    for (const auto& [name, v] : j.at("regs").items()) {
      std::optional<Reg> r = reg_from_name(name);
      if (!r) throw std::runtime_error("unknown register '" + name + "'");
      ms.reg(*r) = mvalue_from_json(v);
    }
  if (j.contains("pc")) ms.pc = mvalue_from_json(j.at("pc"));
  return ms;
}

}  // namespace memlab

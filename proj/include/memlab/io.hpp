#pragma once

#include <nlohmann/json.hpp>

#include "memlab/checkers.hpp"
#include "memlab/machine.hpp"
#include "memlab/relax.hpp"
#include "memlab/state.hpp"

namespace memlab {

inline constexpr const char* kVersion = "0.1.0";

using nlohmann::json;

// Values: {"int": n} | {"bool": b} | "nil" | {"ptr": [id, offset]}.
// Integers that fit in 64 bits are JSON numbers; anything larger becomes a
// decimal string.
json value_to_json(const Value& v);
Value value_from_json(const json& j);

// States: {"store": {var: value}, "heap": [[block, offset, value], ...]}.
json state_to_json(const State& s);
State state_from_json(const json& j);

json config_to_json(const SafetyConfig& cfg);
SafetyConfig config_from_json(const json& j);

json report_to_json(const CheckReport& r);
std::string render_report(const json& j);

// Machine values: {"word": n} | {"ptr": [id, offset]}.
json mvalue_to_json(const MValue& v);
MValue mvalue_from_json(const json& j);

// Machine states: {"blocks": {id: [values]}, "regs": {name: value},
// "pc": value}. Unlisted registers default to W(0).
json machine_to_json(const MachineState& ms);
MachineState machine_from_json(const json& j);

}  // namespace memlab

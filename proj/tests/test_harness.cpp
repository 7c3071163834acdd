#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>
#include <set>

#include "memlab/checkers.hpp"
#include "memlab/io.hpp"

using namespace memlab;

namespace {

json report_without_wall(const CheckReport& r) {
  json j = report_to_json(r);
  j.erase("wall_seconds");
  return j;
}

}  // namespace

TEST_CASE("generator streams are deterministic") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  GenParams gp;
  Rng r1(7), r2(7);
  for (int i = 0; i < 50; ++i) {
    CHECK(equal(*gen_command(r1, gp), *gen_command(r2, gp)));
    CHECK(gen_state(r1, gp) == gen_state(r2, gp));
  }
}

TEST_CASE("generated commands exercise every constructor") {
  Rng rng(9);
  GenParams gp;
  std::set<std::size_t> seen;
  for (int i = 0; i < 300; ++i) {
    std::function<void(const Command&)> walk = [&](const Command& c) {
      seen.insert(c.node.index());
      if (auto* s = std::get_if<SeqC>(&c.node)) {
        walk(*s->first);
        walk(*s->second);
      } else if (auto* f = std::get_if<IfC>(&c.node)) {
        walk(*f->then_branch);
        walk(*f->else_branch);
      } else if (auto* w = std::get_if<WhileC>(&c.node)) {
        walk(*w->body);
      }
    };
    walk(*gen_command(rng, gp));
  }
  CHECK(seen.size() == 9);
}

TEST_CASE("strict campaigns find no violations") {
  GenParams gp;
  gp.trials = 300;
  for (const char* th : {"frame-ok", "frame-loop", "frame-error", "renaming",
                         "noninterference", "integrity-ni", "differential"}) {
    CheckReport r = run_campaign(th, SafetyConfig::strict(), gp);
    INFO(th);
    CHECK(r.trials == 300);
    CHECK(r.violations.empty());
    CHECK(r.applicable > 0);
  }
}

TEST_CASE("machine campaigns find no violations") {
  GenParams gp;
  gp.trials = 300;
  for (const char* th :
       {"mp-frame-ok", "mp-frame-error", "mp-renaming", "mp-noninterference"}) {
    CheckReport r = run_campaign(th, SafetyConfig::strict(), gp);
    INFO(th);
    CHECK(r.violations.empty());
    CHECK(r.applicable > 0);
  }
}

TEST_CASE("worker count changes nothing but wall time") {
  GenParams gp;
  gp.trials = 400;
  gp.seed = 5;
  CheckReport serial = run_campaign("noninterference", SafetyConfig::strict(), gp, 1);
  CheckReport parallel = run_campaign("noninterference", SafetyConfig::strict(), gp, 4);
  CHECK(report_without_wall(serial) == report_without_wall(parallel));
}

TEST_CASE("hunts find the advertised violations") {
  GenParams gp;
  gp.trials = 400;
  gp.seed = 1;

  SafetyConfig fresh;
  fresh.freshness.kind = FreshnessMode::FreshBlocksOnly;
  CheckReport r = hunt("noninterference", fresh, gp);
  REQUIRE(!r.violations.empty());
  // Replays byte for byte from the same seed.
  CheckReport again = hunt("noninterference", fresh, gp);
  CHECK(report_without_wall(r) == report_without_wall(again));

  SafetyConfig phys;
  phys.pointer_eq = PtrEqMode::PhysicalAddress;
  CHECK(!hunt("noninterference", phys, gp).violations.empty());

  SafetyConfig casts;
  casts.casts = true;
  CHECK(!hunt("noninterference", casts, gp).violations.empty());

  SafetyConfig uninit;
  uninit.uninit_memory = true;
  uninit.freshness.kind = FreshnessMode::FreshBlocksOnly;
  CHECK(!hunt("noninterference", uninit, gp).violations.empty());

  SafetyConfig oom;
  oom.memory_limit = 4;
  oom.oom_mode = OomMode::ReturnNil;
  CHECK(!hunt("noninterference", oom, gp).violations.empty());

  SafetyConfig modk;
  modk.freshness.kind = FreshnessMode::ModK;
  modk.freshness.k = 3;
  CHECK(!hunt("frame-ok", modk, gp).violations.empty());
}

TEST_CASE("hunted counterexamples are small") {
  GenParams gp;
  gp.trials = 400;
  gp.seed = 1;
  SafetyConfig fresh;
  fresh.freshness.kind = FreshnessMode::FreshBlocksOnly;
  CheckReport r = hunt("noninterference", fresh, gp);
  REQUIRE(!r.violations.empty());
  // The shrunk program still fits the attack shape: a couple of statements.
  CHECK(r.violations[0].program.size() < 80);
}

TEST_CASE("integrity survives casts even though secrecy does not") {
  GenParams gp;
  gp.trials = 500;
  SafetyConfig casts;
  casts.casts = true;
  CheckReport r = run_campaign("integrity-ni", casts, gp);
  CHECK(r.violations.empty());
  CHECK(r.applicable > 0);
}

TEST_CASE("value and state JSON round trips") {
  Rng rng(13);
  GenParams gp;
  for (int i = 0; i < 200; ++i) {
    State s = gen_state(rng, gp);
    CHECK(state_from_json(state_to_json(s)) == s);
  }
  Value big = Value::integer(Int("340282366920938463463374607431768211455"));
  CHECK(value_from_json(value_to_json(big)) == big);
  Value neg = Value::integer(Int("-99999999999999999999999999"));
  CHECK(value_from_json(value_to_json(neg)) == neg);
  for (const Value& v : {Value::nil(), Value::boolean(true),
                         Value::pointer(3, Int(-2))})
    CHECK(value_from_json(value_to_json(v)) == v);
}

TEST_CASE("config JSON round trips") {
  SafetyConfig cfg;
  cfg.casts = true;
  cfg.forging = true;
  cfg.uninit_memory = true;
  cfg.freshness.kind = FreshnessMode::ModK;
  cfg.freshness.k = 5;
  cfg.memory_limit = 64;
  cfg.oom_mode = OomMode::ReturnNil;
  cfg.pointer_eq = PtrEqMode::PhysicalAddress;
  CHECK(config_from_json(config_to_json(cfg)) == cfg);
  CHECK(config_from_json(config_to_json(SafetyConfig::strict())).is_strict());
}

TEST_CASE("machine JSON round trips") {
  Rng rng(14);
  GenParams gp;
  for (int i = 0; i < 100; ++i) {
    MachineState ms = gen_machine_state(rng, gp);
    MachineState back = machine_from_json(machine_to_json(ms));
    CHECK(back == ms);
  }
}

TEST_CASE("report JSON carries the documented fields") {
  GenParams gp;
  gp.trials = 50;
  gp.seed = 3;
  CheckReport r = run_campaign("renaming", SafetyConfig::strict(), gp);
  json j = report_to_json(r);
  for (const char* key :
       {"theorem", "config", "trials", "applicable", "violations", "seed",
        "version", "wall_seconds"})
    CHECK(j.contains(key));
  CHECK(j["theorem"] == "renaming");
  CHECK(j["seed"] == 3);
  CHECK(j["version"] == kVersion);
  CHECK(render_report(j).find("renaming") != std::string::npos);
}

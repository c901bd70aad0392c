#include <doctest.h>

#include <cstdio>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "crdtcheck/checker.hpp"
#include "crdtcheck/errors.hpp"

using namespace crdtcheck;

namespace {

Scenario scenario(Datatype dt, std::size_t nodes, std::uint64_t seed,
                  std::size_t ops, FaultRates faults = {}) {
  Scenario s;
  s.datatype = dt;
  s.nodes = nodes;
  s.seed = seed;
  s.op_budget = ops;
  s.faults = faults;
  return s;
}

Scenario scripted(Datatype dt, std::size_t nodes, std::vector<ojson> records) {
  Scenario s;
  s.datatype = dt;
  s.nodes = nodes;
  Trace t;
  t.datatype = dt;
  t.nodes = nodes;
  t.records = std::move(records);
  s.script = std::move(t);
  return s;
}

/// The recorded run as an explicit oracle case: its message set plus the
/// happens-before closure of its histories.
template <typename D>
OracleCase<D> oracle_case_of(const World<D>& w) {
  HbIndex<typename D::Op> idx = make_hb_index(w);
  OracleCase<D> oc;
  oc.messages = idx.messages;
  oc.precedes = idx.closure;
  return oc;
}

ojson counter_broadcast(std::size_t node) {
  ojson rec = ojson::object();
  rec["action"] = "broadcast";
  rec["node"] = node;
  rec["operation"] = op_to_json(CounterOp::increment());
  return rec;
}

ojson script_deliver(std::size_t node, const LamportId& id) {
  ojson rec = ojson::object();
  rec["action"] = "deliver";
  rec["node"] = node;
  rec["message-id"] = id_to_json(id);
  return rec;
}

ojson rga_insert_rec(std::size_t node, const LamportId& id, const std::string& val,
                     std::optional<LamportId> after) {
  ojson rec = ojson::object();
  rec["action"] = "broadcast";
  rec["node"] = node;
  rec["operation"] = op_to_json(RgaOp::insert({id, val, false}, after));
  return rec;
}

}  // namespace

TEST_SUITE("verdicts") {
  TEST_CASE("names round-trip") {
    for (Verdict v : {Verdict::converged, Verdict::diverged,
                      Verdict::axiom_violation, Verdict::interpretation_failure}) {
      CHECK(parse_verdict(to_string(v)) == v);
    }
    CHECK_THROWS_AS(parse_verdict("inconclusive"), ParseError);
  }

  TEST_CASE("exit codes") {
    CHECK(exit_code(Verdict::converged) == 0);
    CHECK(exit_code(Verdict::diverged) == 1);
    CHECK(exit_code(Verdict::axiom_violation) == 2);
    CHECK(exit_code(Verdict::interpretation_failure) == 2);
  }
}

TEST_SUITE("scenario validation") {
  TEST_CASE("rejects nonsense") {
    CHECK_THROWS_AS(validate_scenario(scenario(Datatype::counter, 0, 1, 5)),
                    ConfigError);
    CHECK_THROWS_AS(
        validate_scenario(scenario(Datatype::counter, 2, 1, 5, {-0.1, 0, 0})),
        ConfigError);
    CHECK_THROWS_AS(
        validate_scenario(scenario(Datatype::counter, 2, 1, 5, {1.2, 0, 0})),
        ConfigError);
    CHECK_THROWS_AS(
        validate_scenario(scenario(Datatype::counter, 2, 1, 5, {0.5, 0.4, 0.2})),
        ConfigError);
  }

  TEST_CASE("script must match the scenario") {
    Scenario s = scripted(Datatype::counter, 2, {});
    s.script->datatype = Datatype::orset;
    CHECK_THROWS_AS(validate_scenario(s), ConfigError);
    s.script->datatype = Datatype::counter;
    s.script->nodes = 3;
    CHECK_THROWS_AS(validate_scenario(s), ConfigError);
    s.script->nodes = 2;
    CHECK_NOTHROW(validate_scenario(s));
  }
}

TEST_SUITE("report serialization") {
  TEST_CASE("machine-readable form round-trips") {
    Trace t;
    const Report r = run_fuzz(scenario(Datatype::orset, 3, 11, 15, {0.1, 0, 0}), &t);
    const std::string text = render_report(r, ReportFormat::json);
    const Report back = parse_report(text);
    CHECK(back == r);
    CHECK(render_report(back, ReportFormat::json) == text);
  }

  TEST_CASE("round-trip survives witnesses") {
    // an adversarial run so the counterexample fields are populated
    World<Rga> w = World<Rga>::make(2);
    const auto trusting = [](const RgaState&, const Message<RgaOp>&) {
      return true;
    };
    w.broadcast(0, RgaOp::erase({9, 9}), trusting);
    const Report r = finish_report(w, 0);
    REQUIRE(r.witness.has_value());
    REQUIRE(r.sec.counterexample.has_value());
    const Report back = parse_report(render_report(r, ReportFormat::json));
    CHECK(back == r);
  }

  TEST_CASE("text rendering names the essentials") {
    const Report r = run_fuzz(scenario(Datatype::counter, 2, 3, 6));
    const std::string text = render_report(r, ReportFormat::text);
    CHECK(text.find("datatype: counter") != std::string::npos);
    CHECK(text.find("verdict: converged") != std::string::npos);
    CHECK(text.find("final states:") != std::string::npos);
    CHECK(text.find("node 0: ") != std::string::npos);
    CHECK(text.find("histories_distinct: ok") != std::string::npos);
    CHECK(text.find("commutativity=ok") != std::string::npos);
    CHECK(text.find("VIOLATED") == std::string::npos);
  }

  TEST_CASE("malformed report text is rejected") {
    CHECK_THROWS_AS(parse_report("not json"), ParseError);
    CHECK_THROWS_AS(parse_report("{\"datatype\":\"counter\"}"), ParseError);
  }
}

TEST_SUITE("json diff") {
  TEST_CASE("equal values have no diff") {
    CHECK(json_diff(ojson::parse("{\"a\":[1,2]}"), ojson::parse("{\"a\":[1,2]}"))
              .empty());
  }

  TEST_CASE("differences carry paths and both sides") {
    const auto d = json_diff(ojson(1), ojson(2));
    REQUIRE(d.size() == 1);
    CHECK(d[0].at("path") == "/");
    CHECK(d[0].at("left") == 1);
    CHECK(d[0].at("right") == 2);

    const auto nested = json_diff(ojson::parse("{\"a\":{\"b\":1}}"),
                                  ojson::parse("{\"a\":{\"b\":2}}"));
    REQUIRE(nested.size() == 1);
    CHECK(nested[0].at("path") == "/a/b");

    const auto arrays = json_diff(ojson::parse("[1,2,3]"), ojson::parse("[1,2]"));
    REQUIRE(arrays.size() == 1);
    CHECK(arrays[0].at("path") == "/2");
    CHECK(arrays[0].at("right").is_null());

    const auto keys = json_diff(ojson::parse("{\"a\":1}"), ojson::parse("{\"b\":1}"));
    CHECK(keys.size() == 2);
  }

  TEST_CASE("the cap limits output") {
    const auto d = json_diff(ojson::parse("[1,1,1,1,1,1]"),
                             ojson::parse("[2,2,2,2,2,2]"), 3);
    CHECK(d.size() == 3);
  }
}

TEST_SUITE("fuzz driver") {
  TEST_CASE("faultless counter run converges to the tally") {
    Trace t;
    const Report r = run_fuzz(scenario(Datatype::counter, 3, 7, 20), &t);
    CHECK(r.verdict == Verdict::converged);
    CHECK(r.axioms.all_ok());
    CHECK(r.sec.all_ok());
    CHECK(r.stats.broadcasts == 20);
    CHECK(r.stats.delivers == 60);  // every node delivers every message
    CHECK(r.stats.drops == 0);

    // the final value is exactly the increment/decrement tally of the trace
    std::int64_t tally = 0;
    for (const auto& rec : t.records) {
      if (rec.at("action") != "broadcast") continue;
      tally += rec.at("operation").at("op") == "inc" ? 1 : -1;
    }
    REQUIRE(r.per_node_final_states.size() == 3);
    for (const auto& state : r.per_node_final_states) {
      CHECK(state == ojson(tally));
    }
  }

  TEST_CASE("identical scenarios produce identical reports") {
    for (Datatype dt : {Datatype::counter, Datatype::orset, Datatype::rga}) {
      for (std::uint64_t seed : {1, 13, 99}) {
        CAPTURE(to_string(dt));
        CAPTURE(seed);
        const Scenario s = scenario(dt, 4, seed, 18, {0.15, 0.04, 0.1});
        const Report a = run_fuzz(s);
        const Report b = run_fuzz(s);
        CHECK(a == b);
        CHECK(render_report(a, ReportFormat::json) ==
              render_report(b, ReportFormat::json));
      }
    }
  }

  TEST_CASE("emitted traces replay to the same report") {
    for (Datatype dt : {Datatype::counter, Datatype::orset, Datatype::rga}) {
      for (std::uint64_t seed : {2, 5}) {
        CAPTURE(to_string(dt));
        CAPTURE(seed);
        Trace t;
        const Report live = run_fuzz(scenario(dt, 3, seed, 15, {0.2, 0.05, 0}), &t);
        const Report replayed = replay_trace(t);
        CHECK(replayed == live);
        CHECK(render_report(replayed, ReportFormat::json) ==
              render_report(live, ReportFormat::json));
      }
    }
  }

  TEST_CASE("fuzzed runs with faults still converge cleanly") {
    for (Datatype dt : {Datatype::counter, Datatype::orset, Datatype::rga}) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        CAPTURE(to_string(dt));
        CAPTURE(seed);
        const Report r = run_fuzz(scenario(dt, 4, seed, 20, {0.15, 0.04, 0.08}));
        CHECK(r.verdict == Verdict::converged);
        CHECK(r.axioms.all_ok());
        CHECK(r.sec.all_ok());
        CHECK(exit_code(r.verdict) == 0);
      }
    }
  }

  TEST_CASE("the exhaustive oracle agrees with small faultless runs") {
    auto check_against_oracle = [](auto d, std::uint64_t seed) {
      using D = decltype(d);
      Scenario s = scenario(parse_datatype(D::name), 3, seed, 5);
      Trace t;
      const Report fuzzed = run_fuzz(s, &t);
      CHECK(fuzzed.verdict == Verdict::converged);

      // re-execute the recorded actions to get at the world's histories
      Engine<D> replayer(3, 0, nullptr);
      run_script(replayer, t.records);
      const OracleCase<D> oc = oracle_case_of(replayer.world);
      const Enumeration<D> e = enumerate_extensions(oc);
      CHECK(e.converged());
      REQUIRE(e.outcomes.size() == 1);
      REQUIRE(e.outcomes.front().first.has_value());
      const ojson oracle_state = state_to_json(*e.outcomes.front().first);
      for (const auto& state : fuzzed.per_node_final_states) {
        CHECK(state == oracle_state);
      }
    };
    for (std::uint64_t seed : {3, 8, 21}) {
      CAPTURE(seed);
      check_against_oracle(Counter{}, seed);
      check_against_oracle(OrSet{}, seed);
      check_against_oracle(Rga{}, seed);
    }
  }
}

TEST_SUITE("scripted runs") {
  TEST_CASE("hand-written scripts may omit ids on broadcasts") {
    const Report r = run_fuzz(scripted(
        Datatype::counter, 2,
        {counter_broadcast(0), script_deliver(1, {1, 0})}));
    CHECK(r.verdict == Verdict::converged);
    CHECK(r.per_node_final_states ==
          std::vector<ojson>{ojson(1), ojson(1)});
    CHECK(r.stats.broadcasts == 1);
    CHECK(r.stats.delivers == 2);
  }

  TEST_CASE("a deliver before its broadcast names the record") {
    CHECK_THROWS_WITH_AS(
        run_fuzz(scripted(Datatype::counter, 2, {script_deliver(1, {1, 0})})),
        doctest::Contains("record 1"), IllegalAction);
  }

  TEST_CASE("recorded ids are checked against the recomputation") {
    ojson forged = counter_broadcast(0);
    forged["message-id"] = id_to_json({5, 0});
    CHECK_THROWS_WITH_AS(run_fuzz(scripted(Datatype::counter, 2, {forged})),
                         doctest::Contains("id mismatch"), IllegalAction);
  }

  TEST_CASE("unknown actions are refused") {
    ojson rec = ojson::object();
    rec["action"] = "teleport";
    rec["node"] = 0;
    CHECK_THROWS_WITH_AS(run_fuzz(scripted(Datatype::counter, 2, {rec})),
                         doctest::Contains("unknown action"), IllegalAction);
  }

  TEST_CASE("fault records execute and are counted") {
    const Report r = run_fuzz(scripted(
        Datatype::counter, 3,
        {counter_broadcast(0),
         [] {
           ojson rec = ojson::object();
           rec["action"] = "drop";
           rec["node"] = 1;
           rec["message-id"] = id_to_json({1, 0});
           return rec;
         }(),
         script_deliver(2, {1, 0})}));
    CHECK(r.verdict == Verdict::converged);
    CHECK(r.stats.drops == 1);
    // node 1 lost the message; only nodes with equal delivered sets are compared
    CHECK(r.per_node_final_states ==
          std::vector<ojson>{ojson(1), ojson(0), ojson(1)});
  }

  TEST_CASE("concurrent same-anchor inserts converge higher id first") {
    const std::vector<ojson> first_order = {
        rga_insert_rec(0, {1, 0}, "a", std::nullopt),
        script_deliver(1, {1, 0}),
        rga_insert_rec(0, {2, 0}, "b", LamportId{1, 0}),
        rga_insert_rec(1, {2, 1}, "c", LamportId{1, 0}),
        script_deliver(0, {2, 1}),
        script_deliver(1, {2, 0}),
    };
    const std::vector<ojson> second_order = {
        rga_insert_rec(0, {1, 0}, "a", std::nullopt),
        script_deliver(1, {1, 0}),
        rga_insert_rec(1, {2, 1}, "c", LamportId{1, 0}),
        rga_insert_rec(0, {2, 0}, "b", LamportId{1, 0}),
        script_deliver(1, {2, 0}),
        script_deliver(0, {2, 1}),
    };
    const Report a = run_fuzz(scripted(Datatype::rga, 2, first_order));
    const Report b = run_fuzz(scripted(Datatype::rga, 2, second_order));
    CHECK(a.verdict == Verdict::converged);
    CHECK(b.verdict == Verdict::converged);

    const ojson expected = ojson::parse(
        R"([{"id":[1,0],"val":"a","deleted":false},)"
        R"({"id":[2,1],"val":"c","deleted":false},)"
        R"({"id":[2,0],"val":"b","deleted":false}])");
    CHECK(a.per_node_final_states == std::vector<ojson>{expected, expected});
    CHECK(b.per_node_final_states == std::vector<ojson>{expected, expected});
  }

  TEST_CASE("verdict priority prefers the axiom report") {
    // a smuggled unsound broadcast trips both the validity audit and the
    // interpretation; the axiom violation wins
    World<Rga> w = World<Rga>::make(2);
    const auto trusting = [](const RgaState&, const Message<RgaOp>&) {
      return true;
    };
    w.broadcast(0, RgaOp::erase({9, 9}), trusting);
    const Report r = finish_report(w, 0);
    CHECK(r.verdict == Verdict::axiom_violation);
    REQUIRE(r.witness.has_value());
    CHECK(r.witness->at("axiom") == "broadcast_only_valid_msgs");
    CHECK(exit_code(r.verdict) == 2);
  }

  TEST_CASE("interpretation failure is reported when the axioms hold") {
    World<Counter> w = World<Counter>::make(1);
    w.broadcast(0, CounterOp::increment());
    w.violations.push_back({0, {1, 0}, "synthetic failure for the report path"});
    const Report r = finish_report(w, 0);
    CHECK(r.verdict == Verdict::interpretation_failure);
    REQUIRE(r.witness.has_value());
    CHECK(r.witness->at("detail") == "synthetic failure for the report path");
  }
}

TEST_SUITE("log replay") {
  TEST_CASE("worlds rebuild from per-node event logs") {
    const ojson m1 = message_to_json(Message<CounterOp>{
        {1, 0}, CounterOp::increment(), clock_from_json(ojson::parse("[[0,1]]"))});
    const ojson m2 = message_to_json(Message<CounterOp>{
        {1, 1}, CounterOp::decrement(), clock_from_json(ojson::parse("[[1,1]]"))});

    Trace log0;
    log0.datatype = Datatype::counter;
    log0.nodes = 2;
    log0.records = {broadcast_record(0, m1), deliver_record(0, m1),
                    deliver_record(0, m2)};
    Trace log1;
    log1.datatype = Datatype::counter;
    log1.nodes = 2;
    log1.records = {broadcast_record(1, m2), deliver_record(1, m2),
                    deliver_record(1, m1)};

    const World<Counter> w = world_from_logs<Counter>({log0, log1});
    CHECK(w.nodes[0].state == 0);
    CHECK(w.nodes[1].state == 0);
    CHECK(w.nodes[0].delivered_ids == w.nodes[1].delivered_ids);
    CHECK(audit_axioms(w).all_ok());

    save_trace(log0, "checker_log0_test.jsonl");
    save_trace(log1, "checker_log1_test.jsonl");
    const Report r =
        replay_logs({"checker_log0_test.jsonl", "checker_log1_test.jsonl"});
    std::remove("checker_log0_test.jsonl");
    std::remove("checker_log1_test.jsonl");
    CHECK(r.verdict == Verdict::converged);
    CHECK(r.stats.broadcasts == 2);
    CHECK(r.stats.delivers == 4);
  }

  TEST_CASE("event logs admit only broadcast and deliver records") {
    Trace log;
    log.datatype = Datatype::counter;
    log.nodes = 1;
    log.records = {crash_record(0)};
    CHECK_THROWS_WITH_AS(world_from_logs<Counter>({log}),
                         doctest::Contains("broadcast/deliver"), ParseError);
  }

  TEST_CASE("records must belong to their log's node") {
    const ojson m1 = message_to_json(Message<CounterOp>{
        {1, 0}, CounterOp::increment(), clock_from_json(ojson::parse("[[0,1]]"))});
    Trace log;
    log.datatype = Datatype::counter;
    log.nodes = 1;
    log.records = {broadcast_record(3, m1)};
    CHECK_THROWS_WITH_AS(world_from_logs<Counter>({log}),
                         doctest::Contains("belongs to node"), ParseError);
  }

  TEST_CASE("replay_logs validates its file set") {
    CHECK_THROWS_AS(replay_logs({}), ConfigError);

    Trace counter_log;
    counter_log.datatype = Datatype::counter;
    counter_log.nodes = 2;
    Trace rga_log;
    rga_log.datatype = Datatype::rga;
    rga_log.nodes = 2;
    save_trace(counter_log, "checker_log0_test.jsonl");
    save_trace(rga_log, "checker_log1_test.jsonl");
    CHECK_THROWS_WITH_AS(
        replay_logs({"checker_log0_test.jsonl", "checker_log1_test.jsonl"}),
        doctest::Contains("disagree on datatype"), ConfigError);

    save_trace(counter_log, "checker_log1_test.jsonl");
    CHECK_THROWS_WITH_AS(replay_logs({"checker_log0_test.jsonl"}),
                         doctest::Contains("logs were given"), ConfigError);
    std::remove("checker_log0_test.jsonl");
    std::remove("checker_log1_test.jsonl");
  }
}

TEST_SUITE("trace replay entry points") {
  TEST_CASE("zero-node traces are refused") {
    Trace t;
    t.datatype = Datatype::counter;
    t.nodes = 0;
    CHECK_THROWS_AS(replay_trace(t), ConfigError);
  }

  TEST_CASE("a truncated file fails to parse") {
    write_file("checker_truncated_test.jsonl",
               "{\"datatype\":\"counter\",\"nodes\":2}\n"
               "{\"action\":\"broadcast\",\"node\"");
    CHECK_THROWS_WITH_AS(replay_trace_file("checker_truncated_test.jsonl"),
                         doctest::Contains("line 2"), ParseError);
    std::remove("checker_truncated_test.jsonl");
  }
}

TEST_SUITE("brute-force oracle") {
  TEST_CASE("the empty set converges along its one permutation") {
    OracleCase<Counter> oc;
    const Enumeration<Counter> e = enumerate_extensions(oc);
    CHECK(e.permutations == 1);
    CHECK(e.converged());
    REQUIRE(e.outcomes.size() == 1);
    CHECK(e.outcomes.front().first == CounterState{0});
  }

  TEST_CASE("two concurrent counter ops have two equal outcomes") {
    OracleCase<Counter> oc;
    oc.messages = {{{1, 0}, CounterOp::increment(), {}},
                   {{1, 1}, CounterOp::decrement(), {}}};
    oc.precedes = close_precedence(2, {});
    const Enumeration<Counter> e = enumerate_extensions(oc);
    CHECK(e.permutations == 2);
    CHECK(e.converged());
    CHECK(e.outcomes.front().first == CounterState{0});
  }

  TEST_CASE("pairwise-concurrent ops enumerate n factorial orders") {
    for (std::size_t n : {3, 4, 5}) {
      CAPTURE(n);
      OracleCase<Counter> oc;
      for (std::size_t i = 0; i < n; ++i) {
        oc.messages.push_back(
            {{1, static_cast<std::uint32_t>(i)}, CounterOp::increment(), {}});
      }
      oc.precedes = close_precedence(n, {});
      std::uint64_t factorial = 1;
      for (std::size_t i = 2; i <= n; ++i) factorial *= i;
      const Enumeration<Counter> e = enumerate_extensions(oc);
      CHECK(e.permutations == factorial);
      CHECK(e.converged());
    }
  }

  TEST_CASE("a total chain has exactly one extension") {
    OracleCase<Counter> oc;
    oc.messages = {{{1, 0}, CounterOp::increment(), {}},
                   {{2, 0}, CounterOp::increment(), {}},
                   {{3, 0}, CounterOp::decrement(), {}}};
    oc.precedes = close_precedence(3, {{0, 1}, {1, 2}});
    const Enumeration<Counter> e = enumerate_extensions(oc);
    CHECK(e.permutations == 1);
    REQUIRE(e.outcomes.size() == 1);
    CHECK(e.outcomes.front().first == CounterState{1});
  }

  TEST_CASE("three concurrent head inserts land in descending id order") {
    OracleCase<Rga> oc;
    oc.messages = {
        {{1, 0}, RgaOp::insert({{1, 0}, "a", false}, std::nullopt), {}},
        {{1, 1}, RgaOp::insert({{1, 1}, "b", false}, std::nullopt), {}},
        {{2, 0}, RgaOp::insert({{2, 0}, "c", false}, std::nullopt), {}},
    };
    oc.precedes = close_precedence(3, {});
    const Enumeration<Rga> e = enumerate_extensions(oc);
    CHECK(e.permutations == 6);
    CHECK(e.converged());
    REQUIRE(e.outcomes.size() == 1);
    REQUIRE(e.outcomes.front().first.has_value());
    CHECK(rga_read(*e.outcomes.front().first) == "cba");
    CHECK(state_to_json(*e.outcomes.front().first).dump() ==
          R"([{"id":[2,0],"val":"c","deleted":false},)"
          R"({"id":[1,1],"val":"b","deleted":false},)"
          R"({"id":[1,0],"val":"a","deleted":false}])");
  }

  TEST_CASE("the bound is enforced") {
    OracleCase<Counter> oc;
    for (std::size_t i = 0; i < 8; ++i) {
      oc.messages.push_back(
          {{1, static_cast<std::uint32_t>(i)}, CounterOp::increment(), {}});
    }
    oc.precedes = close_precedence(8, {});
    CHECK_THROWS_AS(enumerate_extensions(oc, 7), BoundExceeded);
    CHECK_NOTHROW(enumerate_extensions(oc, 8));
  }

  TEST_CASE("cyclic precedence is rejected") {
    CHECK_THROWS_WITH_AS(close_precedence(2, {{0, 1}, {1, 0}}),
                         doctest::Contains("cycle"), ConfigError);
    CHECK_THROWS_AS(close_precedence(1, {{0, 0}}), ConfigError);
  }

  TEST_CASE("a concurrent add and tag-claiming rem diverge") {
    const std::string spec_text = R"({
      "datatype": "orset",
      "messages": [
        {"message-id": [1,0],
         "operation": {"type":"orset","op":"add","elem":"x","id":[1,0]}},
        {"message-id": [1,1],
         "operation": {"type":"orset","op":"rem","elem":"x","ids":[[1,0]]}}
      ],
      "precedes": []
    })";
    const OracleSpec spec = parse_oracle_spec(spec_text, Datatype::orset, 7);
    const Report r = brute_force_convergence(spec);
    CHECK(r.verdict == Verdict::diverged);
    CHECK(r.extra.at("permutations") == 2);
    CHECK(r.extra.at("distinct-outcomes") == 2);
    REQUIRE(r.witness.has_value());
    CHECK(r.witness->at("orders").size() == 2);
    CHECK(exit_code(r.verdict) == 1);
  }

  TEST_CASE("oracle spec validation") {
    CHECK_THROWS_AS(parse_oracle_spec("not json", Datatype::counter, 7),
                    ParseError);
    CHECK_THROWS_AS(
        parse_oracle_spec(R"({"datatype":"rga","messages":[]})",
                          Datatype::counter, 7),
        ConfigError);
    CHECK_THROWS_AS(
        parse_oracle_spec(R"({"messages":[{"operation":{}}]})",
                          Datatype::counter, 7),
        ParseError);

    // duplicate ids and dangling precedence edges surface at case assembly
    const OracleSpec dupes = parse_oracle_spec(
        R"({"messages":[
            {"message-id":[1,0],"operation":{"type":"counter","op":"inc"}},
            {"message-id":[1,0],"operation":{"type":"counter","op":"dec"}}]})",
        Datatype::counter, 7);
    CHECK_THROWS_WITH_AS(brute_force_convergence(dupes),
                         doctest::Contains("duplicate message id"), ConfigError);

    const OracleSpec dangling = parse_oracle_spec(
        R"({"messages":[
            {"message-id":[1,0],"operation":{"type":"counter","op":"inc"}}],
            "precedes":[[[1,0],[9,9]]]})",
        Datatype::counter, 7);
    CHECK_THROWS_WITH_AS(brute_force_convergence(dangling),
                         doctest::Contains("unknown message id"), ConfigError);
  }
}

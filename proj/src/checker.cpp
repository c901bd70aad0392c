#include "crdtcheck/checker.hpp"

#include <sstream>

namespace crdtcheck {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::diverged: return "diverged";
    case Verdict::axiom_violation: return "axiom_violation";
    case Verdict::interpretation_failure: return "interpretation_failure";
  }
  return "converged";
}

Verdict parse_verdict(const std::string& name) {
  if (name == "converged") return Verdict::converged;
  if (name == "diverged") return Verdict::diverged;
  if (name == "axiom_violation") return Verdict::axiom_violation;
  if (name == "interpretation_failure") return Verdict::interpretation_failure;
  throw ParseError("unknown verdict: " + name);
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::converged: return 0;
    case Verdict::diverged: return 1;
    case Verdict::axiom_violation:
    case Verdict::interpretation_failure: return 2;
  }
  return 0;
}

void validate_scenario(const Scenario& s) {
  if (s.nodes == 0) throw ConfigError("scenario needs at least one node");
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(s.faults.drop) || !in_unit(s.faults.crash) ||
      !in_unit(s.faults.partition)) {
    throw ConfigError("fault rates must lie in [0, 1]");
  }
  if (s.faults.drop + s.faults.crash + s.faults.partition > 1.0) {
    throw ConfigError("fault rates must sum to at most 1");
  }
  if (s.script) {
    if (s.script->datatype != s.datatype) {
      throw ConfigError("script datatype disagrees with scenario datatype");
    }
    if (s.script->nodes != s.nodes) {
      throw ConfigError("script node count disagrees with scenario");
    }
  }
}

// ---- report serialization ---------------------------------------------------

namespace {

ojson sec_witness_to_json(const SecWitness& w) {
  ojson j = ojson::object();
  j["assumption"] = w.assumption;
  j["node"] = w.node;
  j["indices"] = w.indices;
  j["detail"] = w.detail;
  return j;
}

SecWitness sec_witness_from_json(const ojson& j) {
  SecWitness w;
  w.assumption = j.at("assumption").get<std::string>();
  w.node = j.at("node").get<std::size_t>();
  for (const auto& i : j.at("indices")) w.indices.push_back(i.get<std::size_t>());
  w.detail = j.at("detail").get<std::string>();
  return w;
}

ojson sec_to_json(const SecVerdict& v) {
  ojson j = ojson::object();
  j["causality"] = v.causality_ok;
  j["distinctness"] = v.distinctness_ok;
  j["trunc"] = v.trunc_ok;
  j["commutativity"] = v.commutativity_ok;
  j["no_failure"] = v.no_failure_ok;
  j["counterexample"] =
      v.counterexample ? sec_witness_to_json(*v.counterexample) : ojson(nullptr);
  return j;
}

SecVerdict sec_from_json(const ojson& j) {
  SecVerdict v;
  v.causality_ok = j.at("causality").get<bool>();
  v.distinctness_ok = j.at("distinctness").get<bool>();
  v.trunc_ok = j.at("trunc").get<bool>();
  v.commutativity_ok = j.at("commutativity").get<bool>();
  v.no_failure_ok = j.at("no_failure").get<bool>();
  if (!j.at("counterexample").is_null()) {
    v.counterexample = sec_witness_from_json(j.at("counterexample"));
  }
  return v;
}

ojson axiom_check_to_json(const AxiomCheck& c) {
  ojson j = ojson::object();
  j["ok"] = c.ok;
  j["witness"] = c.witness;
  return j;
}

AxiomCheck axiom_check_from_json(const ojson& j) {
  return {j.at("ok").get<bool>(), j.at("witness").get<std::string>()};
}

ojson axioms_to_json(const AxiomReport& a) {
  ojson j = ojson::object();
  j["histories_distinct"] = axiom_check_to_json(a.histories_distinct);
  j["delivery_has_a_cause"] = axiom_check_to_json(a.delivery_has_a_cause);
  j["deliver_locally"] = axiom_check_to_json(a.deliver_locally);
  j["msg_id_unique"] = axiom_check_to_json(a.msg_id_unique);
  j["causal_delivery"] = axiom_check_to_json(a.causal_delivery);
  j["broadcast_only_valid_msgs"] = axiom_check_to_json(a.broadcast_only_valid_msgs);
  return j;
}

AxiomReport axioms_from_json(const ojson& j) {
  AxiomReport a;
  a.histories_distinct = axiom_check_from_json(j.at("histories_distinct"));
  a.delivery_has_a_cause = axiom_check_from_json(j.at("delivery_has_a_cause"));
  a.deliver_locally = axiom_check_from_json(j.at("deliver_locally"));
  a.msg_id_unique = axiom_check_from_json(j.at("msg_id_unique"));
  a.causal_delivery = axiom_check_from_json(j.at("causal_delivery"));
  a.broadcast_only_valid_msgs =
      axiom_check_from_json(j.at("broadcast_only_valid_msgs"));
  return a;
}

}  // namespace

ojson report_to_json(const Report& r) {
  ojson j = ojson::object();
  j["datatype"] = to_string(r.datatype);
  j["verdict"] = to_string(r.verdict);
  j["per_node_final_states"] = r.per_node_final_states;
  j["sec_verdict"] = sec_to_json(r.sec);
  j["axioms"] = axioms_to_json(r.axioms);
  j["witness"] = r.witness ? *r.witness : ojson(nullptr);
  ojson stats = ojson::object();
  stats["broadcasts"] = r.stats.broadcasts;
  stats["delivers"] = r.stats.delivers;
  stats["drops"] = r.stats.drops;
  j["stats"] = stats;
  j["extra"] = r.extra;
  return j;
}

Report parse_report(const std::string& json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  try {
    Report r;
    r.datatype = parse_datatype(j.at("datatype").get<std::string>());
    r.verdict = parse_verdict(j.at("verdict").get<std::string>());
    for (const auto& s : j.at("per_node_final_states")) {
      r.per_node_final_states.push_back(s);
    }
    r.sec = sec_from_json(j.at("sec_verdict"));
    r.axioms = axioms_from_json(j.at("axioms"));
    if (!j.at("witness").is_null()) r.witness = j.at("witness");
    r.stats.broadcasts = j.at("stats").at("broadcasts").get<std::uint64_t>();
    r.stats.delivers = j.at("stats").at("delivers").get<std::uint64_t>();
    r.stats.drops = j.at("stats").at("drops").get<std::uint64_t>();
    r.extra = j.at("extra");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
}

std::string render_report(const Report& r, ReportFormat format) {
  if (format == ReportFormat::json) return report_to_json(r).dump(2) + "\n";

  std::ostringstream out;
  out << "datatype: " << to_string(r.datatype) << "\n";
  out << "verdict: " << to_string(r.verdict) << "\n";
  out << "stats: broadcasts=" << r.stats.broadcasts
      << " delivers=" << r.stats.delivers << " drops=" << r.stats.drops << "\n";
  if (!r.per_node_final_states.empty()) {
    out << "final states:\n";
    for (std::size_t n = 0; n < r.per_node_final_states.size(); ++n) {
      out << "  node " << n << ": " << r.per_node_final_states[n].dump() << "\n";
    }
  }
  auto axiom_line = [&](const char* name, const AxiomCheck& c) {
    out << "  " << name << ": " << (c.ok ? "ok" : "VIOLATED") ;
    if (!c.ok) out << " (" << c.witness << ")";
    out << "\n";
  };
  out << "axioms:\n";
  axiom_line("histories_distinct", r.axioms.histories_distinct);
  axiom_line("delivery_has_a_cause", r.axioms.delivery_has_a_cause);
  axiom_line("deliver_locally", r.axioms.deliver_locally);
  axiom_line("msg_id_unique", r.axioms.msg_id_unique);
  axiom_line("causal_delivery", r.axioms.causal_delivery);
  axiom_line("broadcast_only_valid_msgs", r.axioms.broadcast_only_valid_msgs);
  auto sec_flag = [](bool ok) { return ok ? "ok" : "VIOLATED"; };
  out << "assumptions: causality=" << sec_flag(r.sec.causality_ok)
      << " distinctness=" << sec_flag(r.sec.distinctness_ok)
      << " trunc=" << sec_flag(r.sec.trunc_ok)
      << " commutativity=" << sec_flag(r.sec.commutativity_ok)
      << " no_failure=" << sec_flag(r.sec.no_failure_ok) << "\n";
  if (r.sec.counterexample) {
    out << "  counterexample: " << sec_witness_to_json(*r.sec.counterexample).dump()
        << "\n";
  }
  if (r.witness) out << "witness: " << r.witness->dump() << "\n";
  if (!r.extra.empty()) out << "extra: " << r.extra.dump() << "\n";
  return out.str();
}

bool operator==(const Report& a, const Report& b) {
  return report_to_json(a) == report_to_json(b);
}

std::vector<ojson> json_diff(const ojson& a, const ojson& b, std::size_t cap) {
  std::vector<ojson> out;
  auto emit = [&](const std::string& path, const ojson& left, const ojson& right) {
    if (out.size() >= cap) return;
    ojson d = ojson::object();
    d["path"] = path.empty() ? "/" : path;
    d["left"] = left;
    d["right"] = right;
    out.push_back(std::move(d));
  };
  auto walk = [&](auto&& self, const ojson& x, const ojson& y,
                  const std::string& path) -> void {
    if (out.size() >= cap) return;
    if (x.type() != y.type()) {
      emit(path, x, y);
      return;
    }
    if (x.is_object()) {
      for (auto it = x.begin(); it != x.end(); ++it) {
        if (!y.contains(it.key())) {
          emit(path + "/" + it.key(), it.value(), ojson(nullptr));
        } else {
          self(self, it.value(), y.at(it.key()), path + "/" + it.key());
        }
      }
      for (auto it = y.begin(); it != y.end(); ++it) {
        if (!x.contains(it.key())) {
          emit(path + "/" + it.key(), ojson(nullptr), it.value());
        }
      }
      return;
    }
    if (x.is_array()) {
      const std::size_t common = std::min(x.size(), y.size());
      for (std::size_t i = 0; i < common; ++i) {
        self(self, x[i], y[i], path + "/" + std::to_string(i));
      }
      for (std::size_t i = common; i < x.size(); ++i) {
        emit(path + "/" + std::to_string(i), x[i], ojson(nullptr));
      }
      for (std::size_t i = common; i < y.size(); ++i) {
        emit(path + "/" + std::to_string(i), ojson(nullptr), y[i]);
      }
      return;
    }
    if (x != y) emit(path, x, y);
  };
  walk(walk, a, b, "");
  return out;
}

// ---- dispatch entry points --------------------------------------------------

Report run_fuzz(const Scenario& s, Trace* trace_out) {
  validate_scenario(s);
  return with_datatype(s.datatype, [&](auto d) {
    using D = decltype(d);
    return run_fuzz_typed<D>(s, trace_out);
  });
}

Report replay_trace(const Trace& trace) {
  if (trace.nodes == 0) throw ConfigError("trace names zero nodes");
  return with_datatype(trace.datatype, [&](auto d) {
    using D = decltype(d);
    return replay_trace_typed<D>(trace);
  });
}

Report replay_trace_file(const std::string& path) {
  return replay_trace(load_trace(path));
}

Report replay_logs(const std::vector<std::string>& paths) {
  if (paths.empty()) throw ConfigError("no log files given");
  std::vector<Trace> logs;
  logs.reserve(paths.size());
  for (const auto& path : paths) logs.push_back(load_trace(path));
  for (std::size_t n = 1; n < logs.size(); ++n) {
    if (logs[n].datatype != logs[0].datatype) {
      throw ConfigError("log files disagree on datatype");
    }
  }
  for (const auto& log : logs) {
    if (log.nodes != paths.size()) {
      throw ConfigError("log headers name " + std::to_string(log.nodes) +
                        " nodes but " + std::to_string(paths.size()) +
                        " logs were given");
    }
  }
  return with_datatype(logs[0].datatype, [&](auto d) {
    using D = decltype(d);
    World<D> w = world_from_logs<D>(logs);
    return finish_report(w, 0);
  });
}

// ---- oracle -----------------------------------------------------------------

std::vector<std::vector<bool>> close_precedence(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& [from, to] : edges) reach[from][to] = true;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (reach[i][i]) {
      throw ConfigError("precedence relation has a cycle through message " +
                        std::to_string(i));
    }
  }
  return reach;
}

OracleSpec parse_oracle_spec(const std::string& text, Datatype datatype,
                             std::size_t bound) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("oracle input: ") + e.what());
  }
  OracleSpec spec;
  spec.datatype = datatype;
  spec.bound = bound;
  try {
    if (j.contains("datatype") &&
        parse_datatype(j.at("datatype").get<std::string>()) != datatype) {
      throw ConfigError("oracle file datatype disagrees with --datatype");
    }
    for (const auto& m : j.at("messages")) {
      if (!m.contains("message-id") || !m.contains("operation")) {
        throw ParseError("oracle message needs message-id and operation: " +
                         m.dump());
      }
      spec.messages.push_back(m);
    }
    if (j.contains("precedes")) {
      for (const auto& pair : j.at("precedes")) {
        if (!pair.is_array() || pair.size() != 2) {
          throw ParseError("precedes entry must be [id, id]: " + pair.dump());
        }
        spec.precedes.emplace_back(id_from_json(pair[0]), id_from_json(pair[1]));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("oracle input: ") + e.what());
  }
  return spec;
}

Report brute_force_convergence(const OracleSpec& spec) {
  return with_datatype(spec.datatype, [&](auto d) {
    using D = decltype(d);
    using Op = typename D::Op;
    OracleCase<D> oc;
    std::map<LamportId, std::size_t> index;
    for (const auto& m : spec.messages) {
      Message<Op> msg;
      msg.id = id_from_json(m.at("message-id"));
      msg.op = op_from_json<Op>(m.at("operation"));
      if (m.contains("clock")) msg.clock = clock_from_json(m.at("clock"));
      if (!index.emplace(msg.id, oc.messages.size()).second) {
        throw ConfigError("duplicate message id " + to_string(msg.id));
      }
      oc.messages.push_back(std::move(msg));
    }
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& [from, to] : spec.precedes) {
      auto fi = index.find(from);
      auto ti = index.find(to);
      if (fi == index.end() || ti == index.end()) {
        throw ConfigError("precedes names an unknown message id");
      }
      edges.emplace_back(fi->second, ti->second);
    }
    oc.precedes = close_precedence(oc.messages.size(), edges);
    return brute_force_typed(oc, spec.bound);
  });
}

}  // namespace crdtcheck

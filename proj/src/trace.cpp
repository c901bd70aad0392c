#include "crdtcheck/trace.hpp"

#include <fstream>
#include <sstream>

#include "crdtcheck/errors.hpp"

namespace crdtcheck {

std::string to_string(Datatype dt) {
  switch (dt) {
    case Datatype::counter: return "counter";
    case Datatype::orset: return "orset";
    case Datatype::rga: return "rga";
  }
  return "counter";
}

Datatype parse_datatype(const std::string& name) {
  if (name == "counter") return Datatype::counter;
  if (name == "orset") return Datatype::orset;
  if (name == "rga") return Datatype::rga;
  throw ConfigError("unknown datatype: " + name);
}

// ---- ids and clocks ---------------------------------------------------------

ojson id_to_json(const LamportId& id) {
  return ojson::array({id.counter, id.node});
}

LamportId id_from_json(const ojson& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() ||
      !j[1].is_number_unsigned()) {
    throw ParseError("message id must be [counter, node]: " + j.dump());
  }
  return {j[0].get<std::uint64_t>(), j[1].get<std::uint32_t>()};
}

ojson clock_to_json(const VectorClock& clock) {
  ojson out = ojson::array();
  for (const auto& [node, count] : clock.entries) {
    out.push_back(ojson::array({node, count}));
  }
  return out;
}

VectorClock clock_from_json(const ojson& j) {
  if (!j.is_array()) throw ParseError("clock must be an array: " + j.dump());
  VectorClock clock;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_unsigned() ||
        !entry[1].is_number_unsigned()) {
      throw ParseError("clock entry must be [node, count]: " + entry.dump());
    }
    clock.entries[entry[0].get<std::uint32_t>()] = entry[1].get<std::uint64_t>();
  }
  return clock;
}

// ---- operation payloads -----------------------------------------------------

ojson op_to_json(const CounterOp& op) {
  ojson j = ojson::object();
  j["type"] = "counter";
  j["op"] = op.kind == CounterOpKind::increment ? "inc" : "dec";
  return j;
}

ojson op_to_json(const OrSetOp& op) {
  ojson j = ojson::object();
  j["type"] = "orset";
  if (op.kind == OrSetOpKind::add) {
    j["op"] = "add";
    j["elem"] = op.elem;
    j["id"] = id_to_json(op.id);
  } else {
    j["op"] = "rem";
    j["elem"] = op.elem;
    ojson ids = ojson::array();
    for (const auto& id : op.ids) ids.push_back(id_to_json(id));
    j["ids"] = ids;
  }
  return j;
}

ojson op_to_json(const RgaOp& op) {
  ojson j = ojson::object();
  j["type"] = "rga";
  if (op.kind == RgaOpKind::insert) {
    j["op"] = "ins";
    j["id"] = id_to_json(op.element.id);
    j["val"] = op.element.value;
    j["after"] = op.after ? id_to_json(*op.after) : ojson(nullptr);
  } else {
    j["op"] = "del";
    j["id"] = id_to_json(op.target);
  }
  return j;
}

namespace {

void require_payload(const ojson& j, const char* type) {
  if (!j.is_object() || j.value("type", std::string{}) != type) {
    throw ParseError(std::string("expected a ") + type + " payload: " + j.dump());
  }
}

}  // namespace

CounterOp counter_op_from_json(const ojson& j) {
  require_payload(j, "counter");
  const std::string op = j.value("op", std::string{});
  if (op == "inc") return CounterOp::increment();
  if (op == "dec") return CounterOp::decrement();
  throw ParseError("unknown counter op: " + j.dump());
}

OrSetOp orset_op_from_json(const ojson& j) {
  require_payload(j, "orset");
  const std::string op = j.value("op", std::string{});
  if (!j.contains("elem") || !j.at("elem").is_string()) {
    throw ParseError("orset op needs a string elem: " + j.dump());
  }
  if (op == "add") {
    return OrSetOp::add(id_from_json(j.at("id")), j.at("elem").get<std::string>());
  }
  if (op == "rem") {
    std::set<LamportId> ids;
    for (const auto& id : j.at("ids")) ids.insert(id_from_json(id));
    return OrSetOp::rem(std::move(ids), j.at("elem").get<std::string>());
  }
  throw ParseError("unknown orset op: " + j.dump());
}

RgaOp rga_op_from_json(const ojson& j) {
  require_payload(j, "rga");
  const std::string op = j.value("op", std::string{});
  if (op == "ins") {
    RgaElt element;
    element.id = id_from_json(j.at("id"));
    element.value = j.at("val").get<std::string>();
    std::optional<LamportId> after;
    if (j.contains("after") && !j.at("after").is_null()) {
      after = id_from_json(j.at("after"));
    }
    return RgaOp::insert(element, after);
  }
  if (op == "del") return RgaOp::erase(id_from_json(j.at("id")));
  throw ParseError("unknown rga op: " + j.dump());
}

template <>
CounterOp op_from_json<CounterOp>(const ojson& j) {
  return counter_op_from_json(j);
}
template <>
OrSetOp op_from_json<OrSetOp>(const ojson& j) {
  return orset_op_from_json(j);
}
template <>
RgaOp op_from_json<RgaOp>(const ojson& j) {
  return rga_op_from_json(j);
}

// ---- state renderings -------------------------------------------------------

ojson state_to_json(const CounterState& s) { return s; }

ojson state_to_json(const OrSetState& s) {
  ojson j = ojson::object();
  for (const auto& [elem, ids] : s.tags) {
    ojson tags = ojson::array();
    for (const auto& id : ids) tags.push_back(id_to_json(id));
    j[elem] = tags;
  }
  return j;
}

ojson state_to_json(const RgaState& s) {
  ojson j = ojson::array();
  for (const auto& e : s.elements) {
    ojson cell = ojson::object();
    cell["id"] = id_to_json(e.id);
    cell["val"] = e.value;
    cell["deleted"] = e.deleted;
    j.push_back(cell);
  }
  return j;
}

// ---- trace records ----------------------------------------------------------

namespace {

ojson action_record(const char* action, std::size_t node) {
  ojson j = ojson::object();
  j["action"] = action;
  j["node"] = node;
  return j;
}

ojson message_action_record(const char* action, std::size_t node,
                            const ojson& message) {
  ojson j = action_record(action, node);
  j["message-id"] = message.at("message-id");
  j["operation"] = message.at("operation");
  j["clock"] = message.at("clock");
  return j;
}

}  // namespace

ojson broadcast_record(std::size_t node, const ojson& message) {
  return message_action_record("broadcast", node, message);
}

ojson deliver_record(std::size_t node, const ojson& message) {
  return message_action_record("deliver", node, message);
}

ojson drop_record(std::size_t node, const LamportId& id) {
  ojson j = action_record("drop", node);
  j["message-id"] = id_to_json(id);
  return j;
}

ojson crash_record(std::size_t node) { return action_record("crash", node); }

ojson partition_record(const std::set<std::size_t>& side) {
  ojson j = ojson::object();
  j["action"] = "partition";
  j["nodes"] = side;
  return j;
}

ojson heal_record() {
  ojson j = ojson::object();
  j["action"] = "heal";
  return j;
}

ojson trace_header(Datatype dt, std::size_t nodes) {
  ojson j = ojson::object();
  j["datatype"] = to_string(dt);
  j["nodes"] = nodes;
  return j;
}

Trace parse_trace(const std::string& text) {
  Trace trace;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected an object");
    }
    if (!have_header) {
      if (!j.contains("datatype") || !j.contains("nodes")) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": trace must open with {\"datatype\", \"nodes\"}");
      }
      trace.datatype = parse_datatype(j.at("datatype").get<std::string>());
      if (!j.at("nodes").is_number_unsigned() ||
          j.at("nodes").get<std::size_t>() == 0) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": nodes must be a positive count");
      }
      trace.nodes = j.at("nodes").get<std::size_t>();
      have_header = true;
      continue;
    }
    if (!j.contains("action") || !j.at("action").is_string()) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": record needs an action");
    }
    trace.records.push_back(std::move(j));
  }
  if (!have_header) throw ParseError("empty trace: missing header line");
  return trace;
}

Trace load_trace(const std::string& path) { return parse_trace(read_file(path)); }

std::string render_trace(const Trace& trace) {
  std::string out = trace_header(trace.datatype, trace.nodes).dump() + "\n";
  for (const auto& record : trace.records) out += record.dump() + "\n";
  return out;
}

void save_trace(const Trace& trace, const std::string& path) {
  write_file(path, render_trace(trace));
}

// ---- file helpers -----------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

}  // namespace crdtcheck

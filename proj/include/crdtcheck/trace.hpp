#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "crdtcheck/counter.hpp"
#include "crdtcheck/lamport.hpp"
#include "crdtcheck/message.hpp"
#include "crdtcheck/orset.hpp"
#include "crdtcheck/rga.hpp"
#include "crdtcheck/vector_clock.hpp"

namespace crdtcheck {

/// Object-order-preserving JSON: the trace dialect fixes field order, so objects are
/// built in canonical order and rendered as-is.
using ojson = nlohmann::ordered_json;

enum class Datatype { counter, orset, rga };

std::string to_string(Datatype dt);
Datatype parse_datatype(const std::string& name);  // ConfigError on unknown

// ---- ids and clocks ---------------------------------------------------------

/// [counter, node]
ojson id_to_json(const LamportId& id);
LamportId id_from_json(const ojson& j);

/// [[node, count], ...] ascending by node
ojson clock_to_json(const VectorClock& clock);
VectorClock clock_from_json(const ojson& j);

// ---- operation payloads -----------------------------------------------------

ojson op_to_json(const CounterOp& op);
ojson op_to_json(const OrSetOp& op);
ojson op_to_json(const RgaOp& op);

CounterOp counter_op_from_json(const ojson& j);
OrSetOp orset_op_from_json(const ojson& j);
RgaOp rga_op_from_json(const ojson& j);

template <typename Op>
Op op_from_json(const ojson& j);

// ---- state renderings -------------------------------------------------------

ojson state_to_json(const CounterState& s);
ojson state_to_json(const OrSetState& s);
ojson state_to_json(const RgaState& s);

// ---- messages ---------------------------------------------------------------

/// {"message-id": ..., "operation": ..., "clock": ...}
template <typename Op>
ojson message_to_json(const Message<Op>& m) {
  ojson j = ojson::object();
  j["message-id"] = id_to_json(m.id);
  j["operation"] = op_to_json(m.op);
  j["clock"] = clock_to_json(m.clock);
  return j;
}

template <typename Op>
Message<Op> message_from_json(const ojson& j) {
  Message<Op> m;
  m.id = id_from_json(j.at("message-id"));
  m.op = op_from_json<Op>(j.at("operation"));
  m.clock = clock_from_json(j.at("clock"));
  return m;
}

// ---- trace records ----------------------------------------------------------

/// Canonical action records; fields in order action, node, message-id, operation,
/// clock (partition carries its node set as "nodes" instead).
ojson broadcast_record(std::size_t node, const ojson& message);
ojson deliver_record(std::size_t node, const ojson& message);
ojson drop_record(std::size_t node, const LamportId& id);
ojson crash_record(std::size_t node);
ojson partition_record(const std::set<std::size_t>& side);
ojson heal_record();

/// A parsed trace: the metadata header plus the action records, in order.
struct Trace {
  Datatype datatype = Datatype::counter;
  std::size_t nodes = 0;
  std::vector<ojson> records;
};

ojson trace_header(Datatype dt, std::size_t nodes);

/// Parses JSONL text with a leading header line. ParseError carries the 1-based
/// line number of any offending line.
Trace parse_trace(const std::string& text);
Trace load_trace(const std::string& path);

std::string render_trace(const Trace& trace);
void save_trace(const Trace& trace, const std::string& path);

// ---- small shared helpers ---------------------------------------------------

std::string read_file(const std::string& path);   // ParseError if unreadable
void write_file(const std::string& path, const std::string& text);

}  // namespace crdtcheck

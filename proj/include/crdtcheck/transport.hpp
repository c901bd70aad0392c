#pragma once

#include <sys/socket.h>
#include <sys/types.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "crdtcheck/checker.hpp"
#include "crdtcheck/errors.hpp"
#include "crdtcheck/trace.hpp"
#include "crdtcheck/vector_clock.hpp"

namespace crdtcheck {

struct PeerAddress {
  std::size_t node = 0;
  std::string host;
  std::uint16_t port = 0;
};

/// Static full-mesh membership for one replica process. The peers list covers every
/// node including this one (its entry names the port to listen on).
struct PeerConfig {
  std::size_t self = 0;
  Datatype datatype = Datatype::counter;
  std::vector<PeerAddress> peers;
  std::uint16_t control_port = 0;  // 0: take commands from stdin instead
  std::string log_path;            // empty: no event log

  std::size_t node_count() const { return peers.size(); }
};

/// Parses the structured-text config dialect:
/// {"self": 0, "datatype": "counter",
///  "peers": [[0, "127.0.0.1", 9000], [1, "127.0.0.1", 9001]],
///  "control": 9100, "log": "node0.log"}
PeerConfig parse_peer_config(const std::string& text);
PeerConfig load_peer_config(const std::string& path);

// ---- framing ----------------------------------------------------------------

/// One frame: 4-byte big-endian payload length, then the payload, which is a
/// single trace-format message record (message-id, operation, clock).
std::string encode_frame(const ojson& message_record);

/// Inverse of encode_frame over a complete frame. FrameError on a truncated
/// length prefix, truncated or oversized payload, empty payload, or a payload
/// that is not one message record.
ojson decode_frame(const std::string& frame);

namespace net {
int listen_on(std::uint16_t port);  // BindError when the port cannot be bound
int connect_to(const std::string& host, std::uint16_t port);  // -1 on failure
bool write_all(int fd, const std::string& bytes);
bool read_exact(int fd, void* buf, std::size_t len);  // false on EOF/error
/// Reads one frame payload off a socket; nullopt on clean EOF.
std::optional<std::string> read_frame_payload(int fd);
void shutdown_fd(int fd);
void close_fd(int fd);
std::uint16_t local_port(int fd);
}  // namespace net

// ---- replica process --------------------------------------------------------

/// A live replica: broadcasts local operations to every peer over TCP, holds back
/// arriving messages until they are causally ready, applies each message once, and
/// answers a line-oriented control protocol. Delivery application is serialized
/// through one application thread; socket readers only enqueue.
///
/// Sends are at-least-once: a sender thread that (re)connects replays this node's
/// whole broadcast history, and receivers drop duplicates by id. The `reconnect`,
/// `hold`, and `release` commands exist so harnesses can force those paths
/// deterministically.
template <typename D>
class PeerNode {
 public:
  using Op = typename D::Op;
  using Msg = Message<Op>;

  explicit PeerNode(PeerConfig cfg) : cfg_(std::move(cfg)) {}

  /// Runs until a `quit` command. Throws BindError if a listen port is taken.
  void run() {
    listen_fd_ = net::listen_on(peer_port(cfg_.self));
    if (!cfg_.log_path.empty()) {
      log_.open(cfg_.log_path, std::ios::trunc);
      log_ << trace_header(cfg_.datatype, cfg_.node_count()).dump() << "\n";
      log_.flush();
    }
    accept_thread_ = std::thread([this] { accept_loop(); });
    for (const auto& peer : cfg_.peers) {
      if (peer.node == cfg_.self) continue;
      senders_.push_back(std::make_unique<Sender>(peer));
      Sender* s = senders_.back().get();
      s->thread = std::thread([this, s] { sender_loop(*s); });
    }
    if (cfg_.control_port != 0) {
      control_fd_ = net::listen_on(cfg_.control_port);
      control_thread_ = std::thread([this] { control_loop(); });
      app_loop();
    } else {
      control_thread_ = std::thread([this] { stdin_loop(); });
      app_loop();
    }
    shutdown();
  }

 private:
  struct Command {
    std::string line;
    std::shared_ptr<std::promise<std::string>> reply;
  };
  using Item = std::variant<Msg, Command>;

  struct Sender {
    explicit Sender(PeerAddress a) : addr(std::move(a)) {}
    PeerAddress addr;
    std::thread thread;
    std::size_t next = 0;       // outbox index of the next frame to send
    int fd = -1;
    bool force_reconnect = false;
  };

  PeerConfig cfg_;

  // replicated core, touched by the application thread only
  typename D::State state_ = D::initial();
  VectorClock clock_;
  std::uint64_t lamport_ = 0;
  std::set<LamportId> delivered_;
  std::map<LamportId, Msg> holdback_;
  bool wedged_ = false;  // an interpretation step came up undefined

  std::ofstream log_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Item> queue_;
  std::vector<std::string> outbox_;  // encoded frames of this node's broadcasts
  bool hold_ = false;
  std::atomic<bool> stopping_{false};

  int listen_fd_ = -1;
  int control_fd_ = -1;
  std::atomic<int> control_conn_fd_{-1};
  std::mutex control_mu_;
  std::condition_variable control_cv_;
  bool control_replying_ = false;
  std::thread accept_thread_;
  std::thread control_thread_;
  std::vector<std::unique_ptr<Sender>> senders_;
  std::vector<int> conn_fds_;  // accepted peer connections, for shutdown
  std::vector<std::thread> reader_threads_;

  std::uint16_t peer_port(std::size_t node) const {
    for (const auto& p : cfg_.peers) {
      if (p.node == node) return p.port;
    }
    throw ConfigError("peer list has no entry for node " + std::to_string(node));
  }

  // ---- application thread ---------------------------------------------------

  void app_loop() {
    std::unique_lock<std::mutex> lock(mu_);
    while (!stopping_) {
      cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      while (!queue_.empty()) {
        Item item = std::move(queue_.front());
        queue_.pop_front();
        lock.unlock();
        if (auto* msg = std::get_if<Msg>(&item)) {
          on_message(*msg);
        } else {
          Command& cmd = std::get<Command>(item);
          cmd.reply->set_value(execute(cmd.line));
        }
        lock.lock();
      }
    }
  }

  void on_message(const Msg& m) {
    if (delivered_.count(m.id)) return;  // duplicate frame, applied once already
    holdback_[m.id] = m;
    drain_holdback();
  }

  void drain_holdback() {
    bool progressed = true;
    while (progressed) {
      progressed = false;
      for (auto it = holdback_.begin(); it != holdback_.end(); ++it) {
        const Msg& m = it->second;
        if (!causally_ready(m.clock, m.id.node, clock_)) continue;
        Msg msg = m;
        holdback_.erase(it);
        deliver_local(msg);
        progressed = true;
        break;
      }
    }
  }

  void deliver_local(const Msg& m) {
    delivered_.insert(m.id);
    clock_.bump(m.id.node);
    if (m.id.counter > lamport_) lamport_ = m.id.counter;
    if (log_.is_open()) {
      log_ << deliver_record(cfg_.self, message_to_json(m)).dump() << "\n";
      log_.flush();
    }
    if (wedged_) return;
    auto next = D::interpret(m.op, state_);
    if (next) {
      state_ = std::move(*next);
    } else {
      wedged_ = true;
    }
  }

  std::string broadcast(const Op& op) {
    if (wedged_) return error_reply("node state is undefined");
    Msg msg;
    msg.id = {lamport_ + 1, static_cast<std::uint32_t>(cfg_.self)};
    msg.op = op;
    msg.clock = clock_;
    msg.clock.bump(static_cast<std::uint32_t>(cfg_.self));
    if (!D::valid(state_, msg)) return error_reply("operation invalid here");
    lamport_ += 1;
    if (log_.is_open()) {
      log_ << broadcast_record(cfg_.self, message_to_json(msg)).dump() << "\n";
      log_.flush();
    }
    deliver_local(msg);
    {
      std::lock_guard<std::mutex> lock(mu_);
      outbox_.push_back(encode_frame(message_to_json(msg)));
    }
    cv_.notify_all();
    ojson reply = ojson::object();
    reply["ok"] = true;
    reply["id"] = id_to_json(msg.id);
    return reply.dump();
  }

  static std::string error_reply(const std::string& message) {
    ojson reply = ojson::object();
    reply["ok"] = false;
    reply["error"] = message;
    return reply.dump();
  }

  static std::string ok_reply() {
    ojson reply = ojson::object();
    reply["ok"] = true;
    return reply.dump();
  }

  static std::optional<LamportId> parse_id_token(const std::string& token) {
    const auto at = token.find('@');
    if (at == std::string::npos) return std::nullopt;
    try {
      LamportId id;
      id.counter = std::stoull(token.substr(0, at));
      id.node = static_cast<std::uint32_t>(std::stoul(token.substr(at + 1)));
      return id;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  std::string execute(const std::string& line) {
    std::istringstream in(line);
    std::string verb;
    in >> verb;
    if (verb.empty()) return error_reply("empty command");

    if (verb == "state") {
      ojson reply = ojson::object();
      reply["ok"] = true;
      reply["node"] = cfg_.self;
      reply["datatype"] = to_string(cfg_.datatype);
      reply["state"] = state_to_json(state_);
      ojson delivered = ojson::array();
      for (const auto& id : delivered_) delivered.push_back(id_to_json(id));
      reply["delivered"] = delivered;
      reply["holdback"] = holdback_.size();
      reply["wedged"] = wedged_;
      return reply.dump();
    }
    if (verb == "quit") {
      stopping_ = true;
      cv_.notify_all();
      return "{\"ok\":true,\"bye\":true}";
    }
    if (verb == "reconnect") {
      force_reconnect_all();
      return ok_reply();
    }
    if (verb == "hold") {
      std::lock_guard<std::mutex> lock(mu_);
      hold_ = true;
      return ok_reply();
    }
    if (verb == "release") {
      {
        std::lock_guard<std::mutex> lock(mu_);
        hold_ = false;
      }
      cv_.notify_all();
      return ok_reply();
    }

    if constexpr (std::is_same_v<D, Counter>) {
      if (verb == "inc") return broadcast(CounterOp::increment());
      if (verb == "dec") return broadcast(CounterOp::decrement());
    }
    if constexpr (std::is_same_v<D, OrSet>) {
      std::string elem;
      in >> elem;
      if (verb == "add") {
        if (elem.empty()) return error_reply("add needs an element");
        LamportId id{lamport_ + 1, static_cast<std::uint32_t>(cfg_.self)};
        return broadcast(OrSetOp::add(id, elem));
      }
      if (verb == "rem") {
        if (elem.empty()) return error_reply("rem needs an element");
        return broadcast(OrSetOp::rem(state_.tags_of(elem), elem));
      }
    }
    if constexpr (std::is_same_v<D, Rga>) {
      if (verb == "ins") {
        std::string val, anchor;
        in >> val >> anchor;
        if (val.empty()) return error_reply("ins needs a value");
        RgaElt element;
        element.id = {lamport_ + 1, static_cast<std::uint32_t>(cfg_.self)};
        element.value = val;
        std::optional<LamportId> after;
        if (!anchor.empty()) {
          after = parse_id_token(anchor);
          if (!after) return error_reply("bad anchor id, expected counter@node");
        }
        return broadcast(RgaOp::insert(element, after));
      }
      if (verb == "del") {
        std::string target;
        in >> target;
        auto id = parse_id_token(target);
        if (!id) return error_reply("bad target id, expected counter@node");
        return broadcast(RgaOp::erase(*id));
      }
    }
    return error_reply("unknown command '" + verb + "' for datatype " +
                       to_string(cfg_.datatype));
  }

  // ---- socket threads -------------------------------------------------------

  void accept_loop() {
    while (!stopping_) {
      int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) {
        if (stopping_) return;
        continue;
      }
      {
        std::lock_guard<std::mutex> lock(mu_);
        conn_fds_.push_back(fd);
        reader_threads_.emplace_back([this, fd] { reader_loop(fd); });
      }
    }
  }

  void reader_loop(int fd) {
    while (!stopping_) {
      std::optional<std::string> payload;
      try {
        payload = net::read_frame_payload(fd);
      } catch (const FrameError&) {
        break;  // peer sent garbage; drop the connection
      }
      if (!payload) break;
      Msg msg;
      try {
        msg = message_from_json<Op>(decode_frame_payload_checked(*payload));
      } catch (const Error&) {
        break;
      }
      {
        std::lock_guard<std::mutex> lock(mu_);
        queue_.push_back(std::move(msg));
      }
      cv_.notify_all();
    }
    {
      // drop the fd from the shutdown list before releasing its number, so a
      // later teardown cannot poke whatever the kernel reassigns it to
      std::lock_guard<std::mutex> lock(mu_);
      conn_fds_.erase(std::remove(conn_fds_.begin(), conn_fds_.end(), fd),
                      conn_fds_.end());
    }
    net::close_fd(fd);
  }

  static ojson decode_frame_payload_checked(const std::string& payload) {
    ojson j;
    try {
      j = ojson::parse(payload);
    } catch (const nlohmann::json::exception& e) {
      throw FrameError(std::string("frame payload is not a record: ") + e.what());
    }
    if (!j.is_object() || !j.contains("message-id") || !j.contains("operation") ||
        !j.contains("clock")) {
      throw FrameError("frame payload is not a message record");
    }
    return j;
  }

  void sender_loop(Sender& s) {
    std::unique_lock<std::mutex> lock(mu_);
    while (!stopping_) {
      if (s.fd < 0) {
        lock.unlock();
        int fd = net::connect_to(s.addr.host, s.addr.port);
        lock.lock();
        if (fd < 0) {
          // peer unreachable; retry with a small backoff
          cv_.wait_for(lock, std::chrono::milliseconds(100),
                       [&] { return stopping_.load(); });
          continue;
        }
        s.fd = fd;
        s.next = 0;  // at-least-once: replay the whole history on (re)connect
      }
      cv_.wait(lock, [&] {
        return stopping_ || s.force_reconnect || (!hold_ && s.next < outbox_.size());
      });
      if (stopping_) break;
      if (s.force_reconnect) {
        s.force_reconnect = false;
        net::shutdown_fd(s.fd);
        net::close_fd(s.fd);
        s.fd = -1;
        continue;
      }
      const std::string frame = outbox_[s.next];
      const int fd = s.fd;
      lock.unlock();
      const bool sent = net::write_all(fd, frame);
      lock.lock();
      if (sent) {
        ++s.next;
      } else {
        net::close_fd(s.fd);
        s.fd = -1;
      }
    }
    if (s.fd >= 0) {
      net::close_fd(s.fd);
      s.fd = -1;
    }
  }

  void force_reconnect_all() {
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& s : senders_) s->force_reconnect = true;
    cv_.notify_all();
  }

  // ---- control --------------------------------------------------------------

  void control_loop() {
    while (!stopping_) {
      int fd = ::accept(control_fd_, nullptr, nullptr);
      if (fd < 0) {
        if (stopping_) return;
        continue;
      }
      handle_control_connection(fd);
    }
  }

  void handle_control_connection(int fd) {
    control_conn_fd_ = fd;
    std::string buffer;
    char chunk[512];
    while (!stopping_) {
      auto newline = buffer.find('\n');
      if (newline == std::string::npos) {
        const ssize_t got = ::recv(fd, chunk, sizeof chunk, 0);
        if (got <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(got));
        continue;
      }
      std::string line = buffer.substr(0, newline);
      buffer.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      {
        std::lock_guard<std::mutex> guard(control_mu_);
        control_replying_ = true;
      }
      std::string reply = submit_command(line);
      reply.push_back('\n');
      const bool wrote = net::write_all(fd, reply);
      {
        std::lock_guard<std::mutex> guard(control_mu_);
        control_replying_ = false;
      }
      control_cv_.notify_all();
      if (!wrote) break;
    }
    control_conn_fd_ = -1;
    net::close_fd(fd);
  }

  void stdin_loop() {
    std::string line;
    while (!stopping_ && std::getline(std::cin, line)) {
      if (line.empty()) continue;
      std::string reply = submit_command(line);
      std::cout << reply << "\n" << std::flush;
    }
    stopping_ = true;
    cv_.notify_all();
  }

  std::string submit_command(const std::string& line) {
    Command cmd;
    cmd.line = line;
    cmd.reply = std::make_shared<std::promise<std::string>>();
    std::future<std::string> reply = cmd.reply->get_future();
    {
      std::lock_guard<std::mutex> lock(mu_);
      queue_.push_back(std::move(cmd));
    }
    cv_.notify_all();
    return reply.get();
  }

  // ---- teardown -------------------------------------------------------------

  void shutdown() {
    stopping_ = true;
    cv_.notify_all();
    if (listen_fd_ >= 0) {
      net::shutdown_fd(listen_fd_);
      net::close_fd(listen_fd_);
    }
    if (control_fd_ >= 0) {
      net::shutdown_fd(control_fd_);
      net::close_fd(control_fd_);
    }
    {
      // let an in-flight control reply (the quit acknowledgement in
      // particular) reach the wire before the connection goes away
      std::unique_lock<std::mutex> guard(control_mu_);
      control_cv_.wait_for(guard, std::chrono::seconds(2),
                           [&] { return !control_replying_; });
    }
    const int active_control = control_conn_fd_.exchange(-1);
    if (active_control >= 0) net::shutdown_fd(active_control);
    {
      std::lock_guard<std::mutex> lock(mu_);
      for (int fd : conn_fds_) net::shutdown_fd(fd);
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    if (control_thread_.joinable()) control_thread_.join();
    for (auto& s : senders_) {
      if (s->thread.joinable()) s->thread.join();
    }
    std::vector<std::thread> readers;
    {
      std::lock_guard<std::mutex> lock(mu_);
      readers.swap(reader_threads_);
    }
    for (auto& t : readers) {
      if (t.joinable()) t.join();
    }
    if (log_.is_open()) log_.flush();
  }
};

/// Runs one replica to completion. Returns the process exit code.
int serve(const PeerConfig& cfg);

}  // namespace crdtcheck

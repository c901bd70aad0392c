#include "crdtcheck/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>
#include <set>

namespace crdtcheck {

namespace {
constexpr std::size_t kMaxFramePayload = 1u << 24;  // 16 MiB, far beyond any record

std::uint16_t port_from_json(const ojson& j, const char* what) {
  if (!j.is_number_unsigned() || j.get<std::uint64_t>() > 65535) {
    throw ConfigError(std::string(what) + " must be a port number");
  }
  return static_cast<std::uint16_t>(j.get<std::uint64_t>());
}
}  // namespace

PeerConfig parse_peer_config(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const char* key : {"self", "datatype", "peers"}) {
    if (!j.contains(key)) throw ConfigError(std::string("config lacks \"") + key + "\"");
  }
  PeerConfig cfg;
  if (!j["self"].is_number_unsigned()) throw ConfigError("\"self\" must be a node index");
  cfg.self = j["self"].get<std::size_t>();
  cfg.datatype = parse_datatype(j["datatype"].get<std::string>());
  if (!j["peers"].is_array() || j["peers"].empty()) {
    throw ConfigError("\"peers\" must be a non-empty array");
  }
  std::set<std::size_t> seen;
  for (const auto& entry : j["peers"]) {
    if (!entry.is_array() || entry.size() != 3) {
      throw ConfigError("each peer must be [node, host, port]");
    }
    PeerAddress addr;
    if (!entry[0].is_number_unsigned()) throw ConfigError("peer node must be an index");
    addr.node = entry[0].get<std::size_t>();
    if (!entry[1].is_string()) throw ConfigError("peer host must be a string");
    addr.host = entry[1].get<std::string>();
    addr.port = port_from_json(entry[2], "peer port");
    if (!seen.insert(addr.node).second) {
      throw ConfigError("duplicate peer entry for node " + std::to_string(addr.node));
    }
    cfg.peers.push_back(std::move(addr));
  }
  for (std::size_t i = 0; i < cfg.peers.size(); ++i) {
    if (!seen.count(i)) {
      throw ConfigError("peer list must cover nodes 0.." +
                        std::to_string(cfg.peers.size() - 1));
    }
  }
  if (cfg.self >= cfg.peers.size()) {
    throw ConfigError("\"self\" is not covered by the peer list");
  }
  if (j.contains("control")) cfg.control_port = port_from_json(j["control"], "control");
  if (j.contains("log")) {
    if (!j["log"].is_string()) throw ConfigError("\"log\" must be a path string");
    cfg.log_path = j["log"].get<std::string>();
  }
  return cfg;
}

PeerConfig load_peer_config(const std::string& path) {
  return parse_peer_config(read_file(path));
}

// ---- framing ----------------------------------------------------------------

std::string encode_frame(const ojson& message_record) {
  const std::string payload = message_record.dump();
  std::string frame;
  frame.reserve(payload.size() + 4);
  const auto len = static_cast<std::uint32_t>(payload.size());
  frame.push_back(static_cast<char>((len >> 24) & 0xff));
  frame.push_back(static_cast<char>((len >> 16) & 0xff));
  frame.push_back(static_cast<char>((len >> 8) & 0xff));
  frame.push_back(static_cast<char>(len & 0xff));
  frame += payload;
  return frame;
}

ojson decode_frame(const std::string& frame) {
  if (frame.size() < 4) throw FrameError("frame shorter than its length prefix");
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) {
    len = (len << 8) | static_cast<unsigned char>(frame[static_cast<std::size_t>(i)]);
  }
  if (len == 0) throw FrameError("frame has an empty payload");
  if (len > kMaxFramePayload) throw FrameError("frame payload length is implausible");
  if (frame.size() != 4u + len) {
    throw FrameError("frame payload is truncated or has trailing bytes");
  }
  const std::string payload = frame.substr(4);
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

namespace net {

int listen_on(std::uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw BindError("socket: " + std::string(std::strerror(errno)));
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string why = std::strerror(errno);
    ::close(fd);
    throw BindError("bind port " + std::to_string(port) + ": " + why);
  }
  if (::listen(fd, 16) != 0) {
    const std::string why = std::strerror(errno);
    ::close(fd);
    throw BindError("listen port " + std::to_string(port) + ": " + why);
  }
  return fd;
}

int connect_to(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  const std::string numeric = (host == "localhost") ? "127.0.0.1" : host;
  if (::inet_pton(AF_INET, numeric.c_str(), &addr.sin_addr) != 1) return -1;
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return -1;
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd);
    return -1;
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return fd;
}

bool write_all(int fd, const std::string& bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

bool read_exact(int fd, void* buf, std::size_t len) {
  auto* out = static_cast<char*>(buf);
  std::size_t got = 0;
  while (got < len) {
    const ssize_t n = ::recv(fd, out + got, len - got, 0);
    if (n == 0) return false;
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

std::optional<std::string> read_frame_payload(int fd) {
  unsigned char prefix[4];
  if (!read_exact(fd, prefix, 1)) return std::nullopt;  // clean EOF between frames
  if (!read_exact(fd, prefix + 1, 3)) {
    throw FrameError("connection closed inside a length prefix");
  }
  std::uint32_t len = 0;
  for (unsigned char byte : prefix) len = (len << 8) | byte;
  if (len == 0) throw FrameError("frame has an empty payload");
  if (len > kMaxFramePayload) throw FrameError("frame payload length is implausible");
  std::string payload(len, '\0');
  if (!read_exact(fd, payload.data(), payload.size())) {
    throw FrameError("connection closed inside a frame payload");
  }
  return payload;
}

void shutdown_fd(int fd) {
  if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
}

void close_fd(int fd) {
  if (fd >= 0) ::close(fd);
}

std::uint16_t local_port(int fd) {
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  if (::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) return 0;
  return ntohs(addr.sin_port);
}

}  // namespace net

int serve(const PeerConfig& cfg) {
  ::signal(SIGPIPE, SIG_IGN);
  with_datatype(cfg.datatype, [&](auto tag) {
    using D = decltype(tag);
    PeerNode<D> node(cfg);
    node.run();
  });
  return 0;
}

}  // namespace crdtcheck

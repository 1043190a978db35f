#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "reachlab/arm_env.hpp"

namespace reachlab {

// One session of the v1 line-delimited JSON env protocol. Requests:
//   {"v":1,"cmd":"spec"}
//   {"v":1,"cmd":"reset","seed":<u64>}
//   {"v":1,"cmd":"step","action":[<f64> x N]}
// State responses carry obs, d_pt, ee_pos, ee_quat, qvel, target, done and
// success; rewards are never computed here. A malformed line yields an error
// response and the session continues.
class BridgeSession {
 public:
  explicit BridgeSession(ArmConfig cfg);

  // Consumes one request line, returns one response line (no newline).
  std::string handle_line(const std::string& line);

 private:
  ArmEnv env_;
  bool episode_active_ = false;
};

// Serves one session over the given streams until EOF.
void serve_stream(const ArmConfig& cfg, std::istream& in, std::ostream& out);

struct TcpServerOptions {
  int port = 7777;          // 0 picks an ephemeral port
  int max_connections = -1; // negative: serve forever
};

// Line-delimited sessions over TCP, one connection at a time. Throws
// std::runtime_error when the port cannot be bound. on_listening (if set)
// receives the bound port before the first accept.
void serve_tcp(const ArmConfig& cfg, const TcpServerOptions& options,
               const std::function<void(int)>& on_listening = {});

}  // namespace reachlab

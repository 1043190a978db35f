#include "reachlab/bridge.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace reachlab {

namespace {

using nlohmann::json;

json error_response(const std::string& message) {
  return json{{"v", 1}, {"error", message}};
}

}  // namespace

BridgeSession::BridgeSession(ArmConfig cfg) : env_(std::move(cfg)) {}

std::string BridgeSession::handle_line(const std::string& line) {
  json request = json::parse(line, nullptr, false);
  if (request.is_discarded())
    return error_response("malformed JSON").dump();
  if (!request.is_object()) return error_response("request must be an object").dump();
  if (!request.contains("v") || request.at("v") != 1)
    return error_response("unsupported protocol version; expected \"v\":1").dump();
  if (!request.contains("cmd") || !request.at("cmd").is_string())
    return error_response("missing \"cmd\"").dump();
  const std::string cmd = request.at("cmd").get<std::string>();

  const auto state_response = [this](bool done, bool success) {
    const EnvState& s = env_.state();
    const VecX obs = env_.observe(s);
    json r;
    r["v"] = 1;
    r["obs"] = std::vector<double>(obs.data(), obs.data() + obs.size());
    r["d_pt"] = s.d_pt;
    r["ee_pos"] = {s.ee_pose.position.x(), s.ee_pose.position.y(), s.ee_pose.position.z()};
    const Quat& q = s.ee_pose.orientation;
    r["ee_quat"] = {q.x(), q.y(), q.z(), q.w()};  // scalar-last
    r["qvel"] = std::vector<double>(s.joint_velocities.data(),
                                    s.joint_velocities.data() + s.joint_velocities.size());
    r["target"] = {s.target.x(), s.target.y(), s.target.z()};
    r["done"] = done;
    r["success"] = success;
    return r;
  };

  try {
    if (cmd == "spec") {
      const ArmConfig& cfg = env_.config();
      json r;
      r["v"] = 1;
      r["n_joints"] = cfg.joint_count;
      r["dt"] = cfg.dt;
      r["beta"] = cfg.beta;
      r["max_steps"] = cfg.max_steps;
      r["max_joint_speed"] = cfg.max_joint_speed;
      r["obs_len"] = env_.obs_size();
      r["obs_layout"] = env_.obs_layout();
      r["workspace"] = {cfg.workspace_min_fraction, cfg.workspace_max_fraction};
      return r.dump();
    }
    if (cmd == "reset") {
      if (!request.contains("seed") || !request.at("seed").is_number_unsigned())
        return error_response("reset requires an unsigned \"seed\"").dump();
      env_.reset(request.at("seed").get<std::uint64_t>());
      episode_active_ = true;
      return state_response(false, false).dump();
    }
    if (cmd == "step") {
      if (!episode_active_) return error_response("step before reset").dump();
      if (!request.contains("action") || !request.at("action").is_array())
        return error_response("step requires an \"action\" array").dump();
      const auto& arr = request.at("action");
      VecX action(static_cast<Eigen::Index>(arr.size()));
      for (Eigen::Index i = 0; i < action.size(); ++i) {
        const auto& v = arr[static_cast<std::size_t>(i)];
        if (!v.is_number()) return error_response("action entries must be numbers").dump();
        action(i) = v.get<double>();
      }
      auto [next, inputs] = env_.advance(env_.state(), action);
      const bool success = inputs.task_done;
      const bool done = success || next.step_index >= env_.config().max_steps;
      env_.set_state(std::move(next));
      if (done) episode_active_ = false;
      return state_response(done, success).dump();
    }
    return error_response("unknown cmd \"" + cmd + "\"").dump();
  } catch (const std::exception& e) {
    return error_response(e.what()).dump();
  }
}

void serve_stream(const ArmConfig& cfg, std::istream& in, std::ostream& out) {
  BridgeSession session(cfg);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out << session.handle_line(line) << '\n';
    out.flush();
  }
}

void serve_tcp(const ArmConfig& cfg, const TcpServerOptions& options,
               const std::function<void(int)>& on_listening) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) throw std::runtime_error("socket: " + std::string(std::strerror(errno)));
  const int enable = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &enable, sizeof(enable));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(options.port));
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    const std::string msg = std::strerror(errno);
    ::close(listener);
    throw std::runtime_error("cannot bind port " + std::to_string(options.port) + ": " + msg);
  }
  if (::listen(listener, 1) < 0) {
    const std::string msg = std::strerror(errno);
    ::close(listener);
    throw std::runtime_error("listen: " + msg);
  }
  if (on_listening) {
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(listener, reinterpret_cast<sockaddr*>(&bound), &len);
    on_listening(static_cast<int>(ntohs(bound.sin_port)));
  }

  int served = 0;
  while (options.max_connections < 0 || served < options.max_connections) {
    const int conn = ::accept(listener, nullptr, nullptr);
    if (conn < 0) continue;
    BridgeSession session(cfg);
    std::string buffer;
    char chunk[4096];
    while (true) {
      const ssize_t n = ::read(conn, chunk, sizeof(chunk));
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t pos;
      while ((pos = buffer.find('\n')) != std::string::npos) {
        const std::string line = buffer.substr(0, pos);
        buffer.erase(0, pos + 1);
        if (line.empty()) continue;
        const std::string response = session.handle_line(line) + "\n";
        std::size_t written = 0;
        while (written < response.size()) {
          const ssize_t w =
              ::write(conn, response.data() + written, response.size() - written);
          if (w <= 0) break;
          written += static_cast<std::size_t>(w);
        }
      }
    }
    ::close(conn);
    ++served;
  }
  ::close(listener);
}

}  // namespace reachlab

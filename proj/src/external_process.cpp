#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "crlearn/simulator.hpp"

extern char** environ;

namespace crlearn {

namespace {

using json = nlohmann::json;

struct Pipe {
  int fds[2] = {-1, -1};
  Pipe() {
    if (pipe(fds) != 0)
      throw Error(ErrorCode::ExternalFailure, "pipe() failed");
  }
  ~Pipe() { close_read(); close_write(); }
  void close_read() { if (fds[0] >= 0) { ::close(fds[0]); fds[0] = -1; } }
  void close_write() { if (fds[1] >= 0) { ::close(fds[1]); fds[1] = -1; } }
};

class ChildProcess {
 public:
  ChildProcess(const std::string& command, const std::vector<std::string>& args) {
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child_.fds[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child_.fds[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, to_child_.fds[1]);
    posix_spawn_file_actions_addclose(&actions, from_child_.fds[0]);

    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(command.c_str()));
    for (const std::string& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);

    const int rc = posix_spawnp(&pid_, command.c_str(), &actions, nullptr,
                                argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) {
      pid_ = -1;
      throw Error(ErrorCode::ExternalFailure,
                  "failed to spawn '" + command + "': " + std::strerror(rc));
    }
    to_child_.close_read();
    from_child_.close_write();
  }

  ~ChildProcess() {
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
  }

  void write_line(const std::string& line) {
    std::string payload = line + "\n";
    std::size_t off = 0;
    while (off < payload.size()) {
      const ssize_t w =
          ::write(to_child_.fds[1], payload.data() + off, payload.size() - off);
      if (w < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::ExternalFailure,
                    "write to child failed: " + std::string(std::strerror(errno)));
      }
      off += static_cast<std::size_t>(w);
    }
  }

  void close_stdin() { to_child_.close_write(); }

  /// Reads one newline-terminated line, enforcing the deadline.
  std::string read_line(std::chrono::steady_clock::time_point deadline) {
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline)
        throw Error(ErrorCode::ExternalFailure, "timeout waiting for reply");
      const auto remaining =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
      pollfd pfd{from_child_.fds[0], POLLIN, 0};
      const int pr = ::poll(&pfd, 1, static_cast<int>(remaining.count()) + 1);
      if (pr < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::ExternalFailure, "poll failed");
      }
      if (pr == 0)
        throw Error(ErrorCode::ExternalFailure, "timeout waiting for reply");
      char chunk[4096];
      const ssize_t r = ::read(from_child_.fds[0], chunk, sizeof(chunk));
      if (r < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::ExternalFailure, "read from child failed");
      }
      if (r == 0)
        throw Error(ErrorCode::ExternalFailure,
                    "child closed its output before replying");
      buffer_.append(chunk, static_cast<std::size_t>(r));
    }
  }

  /// Waits for exit (with deadline) and returns the status.
  int wait_exit(std::chrono::steady_clock::time_point deadline) {
    for (;;) {
      int status = 0;
      const pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_) {
        pid_ = -1;
        return status;
      }
      if (r < 0) {
        pid_ = -1;
        throw Error(ErrorCode::ExternalFailure, "waitpid failed");
      }
      if (std::chrono::steady_clock::now() >= deadline) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
        pid_ = -1;
        throw Error(ErrorCode::ExternalFailure, "timeout waiting for child exit");
      }
      ::usleep(2000);
    }
  }

 private:
  Pipe to_child_;
  Pipe from_child_;
  pid_t pid_ = -1;
  std::string buffer_;
};

}  // namespace

// One child per request: send the request line plus the empty session
// terminator, read the single reply, then require a clean zero exit.
DataMatrix simulate_external(const SimulatorSpec& spec, const Vector& theta,
                             Index n, std::uint64_t seed) {
  if (spec.command.empty())
    throw Error(ErrorCode::InvalidConfig, "external simulator has no command");
  const auto deadline =
      std::chrono::steady_clock::now() +
      std::chrono::milliseconds(static_cast<long>(spec.timeout_sec * 1000.0));

  json request;
  request["theta"] = std::vector<double>(theta.data(), theta.data() + theta.size());
  request["n"] = n;
  request["seed"] = seed;

  ChildProcess child(spec.command, spec.args);
  child.write_line(request.dump());
  child.write_line("");
  child.close_stdin();

  const std::string reply = child.read_line(deadline);
  const int status = child.wait_exit(deadline);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw Error(ErrorCode::ExternalFailure,
                "child did not exit cleanly (status " + std::to_string(status) + ")");

  json parsed;
  try {
    parsed = json::parse(reply);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ExternalFailure,
                std::string("malformed reply: ") + e.what());
  }
  if (parsed.contains("error"))
    throw Error(ErrorCode::ExternalFailure,
                "simulator error: " + parsed["error"].get<std::string>());
  if (!parsed.contains("y") || !parsed["y"].is_array())
    throw Error(ErrorCode::ExternalFailure, "reply lacks the \"y\" matrix");

  const auto& rows = parsed["y"];
  if (static_cast<Index>(rows.size()) != n)
    throw Error(ErrorCode::ExternalFailure,
                "reply has " + std::to_string(rows.size()) + " rows, expected " +
                    std::to_string(n));
  Index d_y = -1;
  Matrix y;
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.empty())
      throw Error(ErrorCode::ExternalFailure, "reply row is not a vector");
    if (d_y < 0) {
      d_y = static_cast<Index>(row.size());
      y.resize(n, d_y);
    }
    if (static_cast<Index>(row.size()) != d_y)
      throw Error(ErrorCode::ExternalFailure, "ragged reply rows");
    for (Index j = 0; j < d_y; ++j) {
      const auto& cell = row[static_cast<std::size_t>(j)];
      if (!cell.is_number())
        throw Error(ErrorCode::ExternalFailure, "non-numeric reply entry");
      y(i, j) = cell.get<double>();
    }
  }
  try {
    return DataMatrix(std::move(y));
  } catch (const Error& e) {
    throw Error(ErrorCode::ExternalFailure,
                std::string("reply rejected: ") + e.what());
  }
}

}  // namespace crlearn

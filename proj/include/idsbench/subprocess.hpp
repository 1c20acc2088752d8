#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>

namespace idsbench {

/// A `/bin/sh -c` child with piped stdin/stdout. stdout is delivered line by line
/// to the callback on a reader thread. Killed (SIGTERM, then SIGKILL) on destruction.
class Subprocess {
 public:
  using LineHandler = std::function<void(const std::string&)>;

  Subprocess(const std::string& command, const std::map<std::string, std::string>& env,
             LineHandler on_line);
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  /// Writes `line\n` to the child's stdin; false once the pipe is closed.
  bool write_line(const std::string& line);
  void close_stdin();

  /// Exit status, or nullopt if still running after the timeout.
  std::optional<int> wait_for(std::chrono::milliseconds timeout);
  void terminate();

  int pid() const { return pid_; }

 private:
  int pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  std::optional<int> status_;
  std::thread reader_;
};

/// Runs a command to completion and returns its stdout. Throws on nonzero exit.
std::string run_command(const std::string& command, const std::map<std::string, std::string>& env = {});

}  // namespace idsbench

#include "idsbench/subprocess.hpp"

#include "idsbench/error.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <stdexcept>
#include <vector>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

namespace idsbench {
namespace {

int spawn(const std::string& command, const std::map<std::string, std::string>& env, int& in_fd,
          int& out_fd) {
  int in_pipe[2], out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) throw std::runtime_error("pipe: " + std::string(std::strerror(errno)));
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw std::runtime_error("pipe: " + std::string(std::strerror(errno)));
  }
  // everything the child needs is built before fork; only async-signal-safe calls after it
  std::vector<std::string> env_strings;
  for (char** e = environ; *e; ++e) {
    std::string entry(*e);
    if (!env.contains(entry.substr(0, entry.find('=')))) env_strings.push_back(std::move(entry));
  }
  for (auto& [k, v] : env) env_strings.push_back(k + "=" + v);
  std::vector<char*> envp;
  for (auto& e : env_strings) envp.push_back(e.data());
  envp.push_back(nullptr);
  std::string sh = "sh", dash_c = "-c", cmd = command;
  char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};

  pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    setpgid(0, 0);
    execve("/bin/sh", argv, envp.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  in_fd = in_pipe[1];
  out_fd = out_pipe[0];
  return pid;
}

}  // namespace

Subprocess::Subprocess(const std::string& command, const std::map<std::string, std::string>& env,
                       LineHandler on_line) {
  pid_ = spawn(command, env, stdin_fd_, stdout_fd_);
  reader_ = std::thread([fd = stdout_fd_, on_line = std::move(on_line)] {
    std::string buffer;
    char chunk[4096];
    for (;;) {
      ssize_t n = read(fd, chunk, sizeof chunk);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t pos;
      while ((pos = buffer.find('\n')) != std::string::npos) {
        std::string line = buffer.substr(0, pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        buffer.erase(0, pos + 1);
        if (on_line) on_line(line);
      }
    }
    if (!buffer.empty() && on_line) on_line(buffer);
  });
}

Subprocess::~Subprocess() {
  terminate();
  if (reader_.joinable()) reader_.join();
  if (stdout_fd_ >= 0) close(stdout_fd_);
}

bool Subprocess::write_line(const std::string& line) {
  if (stdin_fd_ < 0) return false;
  std::string data = line + "\n";
  const char* p = data.data();
  std::size_t left = data.size();
  std::signal(SIGPIPE, SIG_IGN);
  while (left > 0) {
    ssize_t n = write(stdin_fd_, p, left);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  return true;
}

void Subprocess::close_stdin() {
  if (stdin_fd_ >= 0) close(stdin_fd_);
  stdin_fd_ = -1;
}

std::optional<int> Subprocess::wait_for(std::chrono::milliseconds timeout) {
  if (status_) return status_;
  auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    int status = 0;
    pid_t r = waitpid(pid_, &status, WNOHANG);
    if (r == pid_) {
      status_ = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
      return status_;
    }
    if (r < 0 && errno != EINTR) {
      status_ = -1;
      return status_;
    }
    if (std::chrono::steady_clock::now() >= deadline) return std::nullopt;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

void Subprocess::terminate() {
  close_stdin();
  if (pid_ < 0) return;
  if (status_) {
    // reap stragglers left in the child's process group
    kill(-pid_, SIGKILL);
    return;
  }
  kill(-pid_, SIGTERM);
  if (!wait_for(std::chrono::milliseconds(500))) {
    kill(-pid_, SIGKILL);
    wait_for(std::chrono::milliseconds(2000));
  }
}

std::string run_command(const std::string& command, const std::map<std::string, std::string>& env) {
  std::string out;
  int status;
  {
    Subprocess p(command, env, [&out](const std::string& line) { out += line + '\n'; });
    p.close_stdin();
    auto s = p.wait_for(std::chrono::seconds(30));
    if (!s) throw InfrastructureError("command timed out: " + command);
    status = *s;
  }  // joins the reader so `out` is complete
  if (status != 0)
    throw InfrastructureError("command failed with status " + std::to_string(status) + ": " + command);
  return out;
}

}  // namespace idsbench

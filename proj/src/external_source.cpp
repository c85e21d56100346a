#include "tibs/external_source.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

namespace tibs {

namespace {

void close_fd(int& fd) noexcept {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

std::string join_command(const std::string& command,
                         const std::vector<std::string>& arguments) {
  std::string joined = command;
  for (const auto& arg : arguments) {
    joined += ' ';
    joined += arg;
  }
  return joined;
}

}  // namespace

ExternalSource::ExternalSource(std::string command,
                               std::vector<std::string> arguments,
                               std::chrono::milliseconds grace)
    : command_(std::move(command)),
      arguments_(std::move(arguments)),
      grace_(grace) {
  int in_pipe[2];   // parent -> child stdin
  int out_pipe[2];  // child stdout -> parent
  int err_pipe[2];  // exec-failure errno back-channel, CLOEXEC
  if (::pipe(in_pipe) != 0)
    throw SourceError("external source: pipe failed: " +
                          std::string(std::strerror(errno)),
                      0);
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw SourceError("external source: pipe failed: " +
                          std::string(std::strerror(errno)),
                      0);
  }
  if (::pipe2(err_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    throw SourceError("external source: pipe failed: " +
                          std::string(std::strerror(errno)),
                      0);
  }

  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1],
                   err_pipe[0], err_pipe[1]})
      ::close(fd);
    throw SourceError("external source: fork failed: " +
                          std::string(std::strerror(errno)),
                      0);
  }

  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1],
                   err_pipe[0]})
      ::close(fd);
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(command_.c_str()));
    for (auto& arg : arguments_) argv.push_back(const_cast<char*>(arg.c_str()));
    argv.push_back(nullptr);
    ::execvp(command_.c_str(), argv.data());
    const int exec_errno = errno;
    [[maybe_unused]] ssize_t n =
        ::write(err_pipe[1], &exec_errno, sizeof exec_errno);
    ::_exit(127);
  }

  pid_ = pid;
  child_stdin_ = in_pipe[1];
  child_stdout_ = out_pipe[0];
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);

  // Blocks until the child execs (EOF via CLOEXEC) or reports an errno.
  int exec_errno = 0;
  const ssize_t got = ::read(err_pipe[0], &exec_errno, sizeof exec_errno);
  ::close(err_pipe[0]);
  if (got == static_cast<ssize_t>(sizeof exec_errno)) {
    int status = 0;
    ::waitpid(pid, &status, 0);
    pid_ = -1;
    close_fd(child_stdin_);
    close_fd(child_stdout_);
    throw SourceError("external source: cannot execute '" + command_ +
                          "': " + std::strerror(exec_errno),
                      0);
  }
}

ExternalSource::~ExternalSource() { shutdown(); }

std::string ExternalSource::descriptor() const {
  return "external(" + join_command(command_, arguments_) + ")";
}

bool ExternalSource::draw() {
  // Exactly two bytes per trial: '0' or '1' then LF. Reading per trial means
  // the child's stream is never pulled past the stopping time.
  char buf[2];
  std::size_t have = 0;
  while (have < 2) {
    const ssize_t r = ::read(child_stdout_, buf + have, 2 - have);
    if (r == 0)
      throw SourceError("external source '" + command_ +
                            "' ended its trial stream after " +
                            std::to_string(trials_consumed()) + " trials",
                        trials_consumed());
    if (r < 0) {
      if (errno == EINTR) continue;
      throw SourceError("external source '" + command_ +
                            "' read failed after " +
                            std::to_string(trials_consumed()) +
                            " trials: " + std::strerror(errno),
                        trials_consumed());
    }
    have += static_cast<std::size_t>(r);
  }
  if ((buf[0] != '0' && buf[0] != '1') || buf[1] != '\n') {
    char detail[64];
    std::snprintf(detail, sizeof detail, "0x%02X 0x%02X",
                  static_cast<unsigned char>(buf[0]),
                  static_cast<unsigned char>(buf[1]));
    throw SourceError("external source '" + command_ +
                          "' protocol error after " +
                          std::to_string(trials_consumed()) +
                          " trials: expected '0' or '1' + LF, got bytes " +
                          detail,
                      trials_consumed());
  }
  return buf[0] == '1';
}

void ExternalSource::shutdown() noexcept {
  if (pid_ < 0) {
    close_fd(child_stdin_);
    close_fd(child_stdout_);
    return;
  }
  // Stop signal: stdin EOF. Dropping the read side as well unblocks a child
  // stuck writing into a full pipe (it gets EPIPE/SIGPIPE).
  close_fd(child_stdin_);
  close_fd(child_stdout_);

  const auto deadline = std::chrono::steady_clock::now() + grace_;
  int status = 0;
  for (;;) {
    const pid_t r = ::waitpid(static_cast<pid_t>(pid_), &status, WNOHANG);
    if (r != 0) {
      pid_ = -1;
      return;
    }
    if (std::chrono::steady_clock::now() >= deadline) break;
    std::this_thread::sleep_for(std::chrono::milliseconds{10});
  }
  ::kill(static_cast<pid_t>(pid_), SIGKILL);
  ::waitpid(static_cast<pid_t>(pid_), &status, 0);
  pid_ = -1;
}

}  // namespace tibs

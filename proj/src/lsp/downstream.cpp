#include "tabledsl/lsp/downstream.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <iostream>

#include "tabledsl/lsp/framing.hpp"

namespace tabledsl::lsp {

ProcessDownstream::~ProcessDownstream() { stop(); }

bool ProcessDownstream::start(MessageHandler on_message, ExitHandler on_exit) {
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) return false;
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    return false;
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    return false;
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];

  relay_ = std::thread([fd = from_child_, on_message = std::move(on_message),
                        on_exit = std::move(on_exit)] {
    FdSource source(fd);
    try {
      while (auto body = read_message(source)) on_message(std::move(*body));
    } catch (const FramingError& e) {
      std::cerr << "tabledsl: downstream framing error: " << e.what() << "\n";
    }
    on_exit();
  });
  return true;
}

bool ProcessDownstream::send(const std::string& body) {
  std::lock_guard lock(write_mu_);
  if (to_child_ < 0) return false;
  return write_all(to_child_, frame(body));
}

void ProcessDownstream::close_input() {
  std::lock_guard lock(write_mu_);
  if (to_child_ >= 0) ::close(to_child_);
  to_child_ = -1;
}

void ProcessDownstream::stop() {
  close_input();
  if (pid_ > 0) {
    using namespace std::chrono;
    const auto deadline = steady_clock::now() + seconds(2);
    int status = 0;
    while (::waitpid(pid_, &status, WNOHANG) == 0) {
      if (steady_clock::now() > deadline) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
        break;
      }
      std::this_thread::sleep_for(milliseconds(10));
    }
    pid_ = -1;
  }
  if (relay_.joinable()) relay_.join();
  if (from_child_ >= 0) ::close(from_child_);
  from_child_ = -1;
}

}  // namespace tabledsl::lsp

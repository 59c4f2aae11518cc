// Connection to a general-purpose language server running as a child.

#pragma once

#include <sys/types.h>

#include <functional>
#include <mutex>
#include <string>
#include <thread>

namespace tabledsl::lsp {

class Downstream {
 public:
  using MessageHandler = std::function<void(std::string body)>;
  using ExitHandler = std::function<void()>;

  virtual ~Downstream() = default;

  /// Starts the server. Handlers run on a relay thread owned by the
  /// downstream; `on_exit` is called once when its output ends.
  virtual bool start(MessageHandler on_message, ExitHandler on_exit) = 0;
  /// Sends one message body. False once the server is gone.
  virtual bool send(const std::string& body) = 0;
  /// Closes the server's input, waits briefly, then kills it. Joins the relay.
  virtual void stop() = 0;
};

/// Runs `command` through /bin/sh and talks to it over its standard streams.
class ProcessDownstream : public Downstream {
 public:
  explicit ProcessDownstream(std::string command) : command_(std::move(command)) {}
  ~ProcessDownstream() override;

  bool start(MessageHandler on_message, ExitHandler on_exit) override;
  bool send(const std::string& body) override;
  void stop() override;

  pid_t pid() const { return pid_; }

 private:
  void close_input();

  std::string command_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::mutex write_mu_;
  std::thread relay_;
};

}  // namespace tabledsl::lsp

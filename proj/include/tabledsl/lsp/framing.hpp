// `Content-Length` message framing of the language server protocol.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <streambuf>
#include <string>
#include <vector>

namespace tabledsl::lsp {

struct FramingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Blocking byte input. get() returns -1 at end of input.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  virtual int get() = 0;
  virtual bool read_exact(char* dst, std::size_t n) = 0;
};

class FdSource : public ByteSource {
 public:
  explicit FdSource(int fd) : fd_(fd), buf_(1 << 16) {}
  int get() override;
  bool read_exact(char* dst, std::size_t n) override;

 private:
  bool fill();
  int fd_;
  std::vector<char> buf_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

class StreamSource : public ByteSource {
 public:
  explicit StreamSource(std::streambuf& sb) : sb_(sb) {}
  int get() override;
  bool read_exact(char* dst, std::size_t n) override;

 private:
  std::streambuf& sb_;
};

/// Next message body, or nullopt when input ends cleanly between messages.
/// Throws FramingError on a malformed header or a truncated body.
std::optional<std::string> read_message(ByteSource& in);

/// Header plus body, ready to be written.
std::string frame(const std::string& body);

/// Writes all of `data` to `fd`, retrying on EINTR. False on failure.
bool write_all(int fd, const std::string& data);

}  // namespace tabledsl::lsp

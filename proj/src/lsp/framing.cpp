#include "tabledsl/lsp/framing.hpp"

#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <cctype>

namespace tabledsl::lsp {
namespace {

constexpr std::size_t kMaxHeaderLine = 4096;
constexpr std::size_t kMaxBody = std::size_t{256} << 20;

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

// Reads one header line without its CRLF. nullopt at end of input before
// any byte of the line.
std::optional<std::string> read_header_line(ByteSource& in) {
  std::string line;
  for (;;) {
    const int c = in.get();
    if (c < 0) {
      if (line.empty()) return std::nullopt;
      throw FramingError("input ended inside a header");
    }
    if (c == '\n') {
      if (line.empty() || line.back() != '\r') throw FramingError("header line not terminated by CRLF");
      line.pop_back();
      return line;
    }
    line.push_back(static_cast<char>(c));
    if (line.size() > kMaxHeaderLine) throw FramingError("header line too long");
  }
}

}  // namespace

bool FdSource::fill() {
  for (;;) {
    const ssize_t n = ::read(fd_, buf_.data(), buf_.size());
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    pos_ = 0;
    end_ = static_cast<std::size_t>(n);
    return true;
  }
}

int FdSource::get() {
  if (pos_ == end_ && !fill()) return -1;
  return static_cast<unsigned char>(buf_[pos_++]);
}

bool FdSource::read_exact(char* dst, std::size_t n) {
  while (n > 0) {
    if (pos_ == end_ && !fill()) return false;
    const std::size_t chunk = std::min(n, end_ - pos_);
    std::memcpy(dst, buf_.data() + pos_, chunk);
    pos_ += chunk;
    dst += chunk;
    n -= chunk;
  }
  return true;
}

int StreamSource::get() {
  const auto c = sb_.sbumpc();
  if (c == std::char_traits<char>::eof()) return -1;
  return static_cast<unsigned char>(std::char_traits<char>::to_char_type(c));
}

bool StreamSource::read_exact(char* dst, std::size_t n) {
  return static_cast<std::size_t>(sb_.sgetn(dst, static_cast<std::streamsize>(n))) == n;
}

std::optional<std::string> read_message(ByteSource& in) {
  std::optional<std::size_t> length;
  bool first = true;
  for (;;) {
    auto line = read_header_line(in);
    if (!line) {
      if (first) return std::nullopt;
      throw FramingError("input ended inside a header");
    }
    first = false;
    if (line->empty()) break;
    const auto colon = line->find(':');
    if (colon == std::string::npos) throw FramingError("malformed header '" + *line + "'");
    const std::string_view name = std::string_view(*line).substr(0, colon);
    std::string_view value = std::string_view(*line).substr(colon + 1);
    while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
    while (!value.empty() && value.back() == ' ') value.remove_suffix(1);
    if (iequals(name, "Content-Length")) {
      std::size_t n = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
      if (ec != std::errc() || ptr != value.data() + value.size() || value.empty())
        throw FramingError("invalid Content-Length '" + std::string(value) + "'");
      if (n > kMaxBody) throw FramingError("message body too large");
      length = n;
    }
  }
  if (!length) throw FramingError("missing Content-Length header");
  std::string body(*length, '\0');
  if (!in.read_exact(body.data(), body.size())) throw FramingError("input ended inside a message body");
  return body;
}

std::string frame(const std::string& body) {
  return "Content-Length: " + std::to_string(body.size()) + "\r\n\r\n" + body;
}

bool write_all(int fd, const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    done += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace tabledsl::lsp

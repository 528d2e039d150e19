#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ckg {

// Raised by every text-format loader. line() is 1-based; 0 means the error
// is not tied to a particular line (I/O failure, empty file).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(format(source, line, what)), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  static std::string format(const std::string& source, std::size_t line,
                            const std::string& what) {
    std::string msg = source;
    if (line > 0) msg += ":" + std::to_string(line);
    return msg + ": " + what;
  }

  std::size_t line_;
};

}  // namespace ckg

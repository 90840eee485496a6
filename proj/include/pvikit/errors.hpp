#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pvikit {

// Malformed or unreadable input data. Carries the offending file and the
// 1-based line number when one applies (0 otherwise).
class DataError : public std::runtime_error {
 public:
  DataError(std::string path, std::size_t line, const std::string& what)
      : std::runtime_error(format(path, line, what)), path_(std::move(path)), line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& path, std::size_t line, const std::string& what) {
    std::string out = path;
    if (line > 0) out += ":" + std::to_string(line);
    if (!out.empty()) out += ": ";
    return out + what;
  }

  std::string path_;
  std::size_t line_;
};

}  // namespace pvikit

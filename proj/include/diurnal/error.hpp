/**
 * @file error.hpp
 * @brief Error type shared by every stage of the pipeline.
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diurnal {

enum class ErrorKind {
  Parse,
  Duplicate,
  EmptyInput,
  Contract,
  SampleTooSmall,
  Degenerate,
  ImputationImpossible,
  Io,
};

/**
 * @brief Exception carrying a machine-checkable kind and, for parse errors, the offending line.
 */
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), kind_(kind), line_(line) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  /// 1-based line number, 0 when not applicable.
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::size_t line_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what, std::size_t line = 0) {
  throw Error(kind, what, line);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) {
    fail(ErrorKind::Contract, what);
  }
}

}  // namespace diurnal

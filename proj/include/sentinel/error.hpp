// Exception types shared by the library and the command-line tool.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sentinel {

// Bad arguments or configuration. Maps to exit code 2.
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Malformed input file. Carries the byte offset where parsing stopped.
class FormatError : public std::runtime_error {
  public:
    FormatError(const std::string& what, std::uint64_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

  private:
    std::uint64_t offset_;
};

// Numerical failure: non-convergence or data the estimator cannot handle.
// Maps to exit code 3.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DegenerateDataError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

} // namespace sentinel

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace temcodec {

// Malformed or inconsistent serialized data. `offset` is the byte position
// at which the problem was detected (npos when the error is not tied to a
// specific byte, e.g. a non-positive replayed interval).
class FormatError : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  FormatError(std::string message, std::size_t offset = npos)
      : std::runtime_error(std::move(message)), offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// The biased integrand stayed non-positive for a whole interval-bound span,
// so the encoder could not fire. Carries the time where it went non-positive.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(std::string message, double time)
      : std::runtime_error(std::move(message)), time_(time) {}

  double time() const { return time_; }

 private:
  double time_;
};

// The least-squares operator has no usable singular values.
class DegenerateSystemError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace temcodec

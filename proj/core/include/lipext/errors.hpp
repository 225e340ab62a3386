#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lipext {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A candidate instance failed validation. `field` names the offending input
/// field and `witness` carries the offending point indices (a triangle-inequality
/// violation reports the triple (i, j, k) with d(i,k) > d(i,j) + d(j,k)).
class InvalidInstance : public Error {
 public:
  InvalidInstance(std::string field, const std::string& message,
                  std::vector<std::size_t> witness = {})
      : Error(message), field_(std::move(field)), witness_(std::move(witness)) {}

  const std::string& field() const noexcept { return field_; }
  const std::vector<std::size_t>& witness() const noexcept { return witness_; }

 private:
  std::string field_;
  std::vector<std::size_t> witness_;
};

/// A parameter is outside the operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Raised when L = 0: the constant extension is the answer and no scale
/// schedule exists.
class TrivialInstance : public Error {
 public:
  using Error::Error;
};

/// The stored scale range is too shallow for the request. `required_k_min` is
/// the smallest index the schedule must reach.
class ScheduleExhausted : public Error {
 public:
  ScheduleExhausted(const std::string& message, int required_k_min)
      : Error(message), required_k_min_(required_k_min) {}

  int required_k_min() const noexcept { return required_k_min_; }

 private:
  int required_k_min_;
};

}  // namespace lipext

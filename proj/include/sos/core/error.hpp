#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sos {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A call was made with arguments outside the operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A catalog shape violates a structural requirement (e.g. disconnected).
class CatalogError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed the configured state-space cap.
class SizeCapError : public Error {
 public:
  SizeCapError(double estimated_size, std::size_t cap)
      : Error("state space of ~" + std::to_string(static_cast<long long>(estimated_size)) +
              " states exceeds the cap of " + std::to_string(cap)),
        estimated_size_(estimated_size),
        cap_(cap) {}

  double estimated_size() const noexcept { return estimated_size_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  double estimated_size_;
  std::size_t cap_;
};

/// A generator handed to a reversible-only routine fails detailed balance.
class NotReversibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace sos

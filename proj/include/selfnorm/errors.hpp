#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace selfnorm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two operands were built over different group contexts.
class ContextMismatch : public Error {
 public:
  ContextMismatch() : Error("operands belong to different group contexts") {}
};

/// A precondition of a construction or lemma does not hold for the input.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed the configured term/word budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::string what, std::uint64_t predicted, std::uint64_t budget)
      : Error(what + ": predicted " + std::to_string(predicted) +
              " terms exceeds budget " + std::to_string(budget)),
        predicted_(predicted),
        budget_(budget) {}

  std::uint64_t predicted() const { return predicted_; }
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t predicted_;
  std::uint64_t budget_;
};

/// Rational coefficients grew past the configured bit-length cap.
class CoefficientGrowth : public Error {
 public:
  CoefficientGrowth(std::size_t bits, std::size_t cap)
      : Error("coefficient of " + std::to_string(bits) +
              " bits exceeds cap of " + std::to_string(cap) + " bits"),
        bits_(bits) {}

  std::size_t bits() const { return bits_; }

 private:
  std::size_t bits_;
};

/// Malformed textual input. `position` is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        message_(message),
        position_(position) {}

  std::size_t position() const { return position_; }
  /// The diagnostic without the position suffix.
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  std::size_t position_;
};

}  // namespace selfnorm

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace flipfair {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document; the message carries the row/column or field.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a model constraint (m != k*n, negative value, bad id...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed the configured budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::string count, std::string budget)
      : Error("enumeration of " + count + " allocations exceeds budget " + budget),
        count_(std::move(count)),
        budget_(std::move(budget)) {}
  [[nodiscard]] const std::string& count() const { return count_; }
  [[nodiscard]] const std::string& budget() const { return budget_; }

 private:
  std::string count_;
  std::string budget_;
};

/// A scripted choice was illegal at its step, or was never consumed.
class ScriptError : public Error {
 public:
  using Error::Error;
};

/// A state that additive valuations rule out (e.g. envy without any rational flip),
/// or a violated run-time invariant in debug-checked algorithm runs.
class ImpossibleState : public Error {
 public:
  using Error::Error;
};

class FixtureError : public Error {
 public:
  using Error::Error;
};

}  // namespace flipfair

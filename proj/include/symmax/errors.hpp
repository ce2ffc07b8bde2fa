#ifndef SYMMAX_ERRORS_HPP
#define SYMMAX_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace symmax {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte offset into the source.
class ParseError : public Error {
public:
  ParseError(std::size_t offset, std::string expected)
      : Error("syntax error at offset " + std::to_string(offset) +
              ": expected " + expected),
        offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string &expected() const noexcept { return expected_; }

private:
  std::size_t offset_;
  std::string expected_;
};

class UnknownIdentifierError : public Error {
public:
  UnknownIdentifierError(std::string name, std::size_t offset)
      : Error("unknown identifier \"" + name + "\" at offset " +
              std::to_string(offset)),
        name_(std::move(name)), offset_(offset) {}

  const std::string &name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }

private:
  std::string name_;
  std::size_t offset_;
};

/// Evaluation left the domain of an operation (x/0, sqrt(-1), overflow).
class DomainError : public Error {
public:
  explicit DomainError(std::string subexpression, const std::string &what)
      : Error(what + " in \"" + subexpression + "\""),
        subexpression_(std::move(subexpression)) {}

  const std::string &subexpression() const noexcept { return subexpression_; }

private:
  std::string subexpression_;
};

/// A probed functional returned a non-finite value.
class EvaluationError : public Error {
public:
  using Error::Error;
};

class DegenerateMetricError : public Error {
public:
  using Error::Error;
};

class SingularTensorError : public Error {
public:
  using Error::Error;
};

/// Fixed-point iteration of the implicit midpoint rule did not converge.
class DivergenceError : public Error {
public:
  DivergenceError(double residual, int iterations, long step = -1)
      : Error((step >= 0 ? "step " + std::to_string(step) + ": " : std::string()) +
              "implicit midpoint did not converge after " +
              std::to_string(iterations) + " iterations (relative residual " +
              std::to_string(residual) + ")"),
        residual_(residual), iterations_(iterations), step_(step) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }
  /// Failing step index inside a run, -1 for a lone step.
  long step() const noexcept { return step_; }

private:
  double residual_;
  int iterations_;
  long step_;
};

/// A non-finite value appeared in the state during a run.
class BlowUpError : public Error {
public:
  BlowUpError(long step, std::string component)
      : Error("non-finite state at step " + std::to_string(step) + ": " +
              component),
        step_(step), component_(std::move(component)) {}

  long step() const noexcept { return step_; }
  const std::string &component() const noexcept { return component_; }

private:
  long step_;
  std::string component_;
};

/// A step failed inside a run; wraps the original message with the index.
class StepError : public Error {
public:
  StepError(long step, const std::string &cause)
      : Error("step " + std::to_string(step) + " failed: " + cause),
        step_(step) {}

  long step() const noexcept { return step_; }

private:
  long step_;
};

/// Scenario file problems. Carries every problem found, not just the first.
class ConfigError : public Error {
public:
  explicit ConfigError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string> &problems() const noexcept { return problems_; }

private:
  static std::string join(const std::vector<std::string> &items) {
    std::string out;
    for (const auto &item : items) {
      if (!out.empty())
        out += '\n';
      out += item;
    }
    return out;
  }

  std::vector<std::string> problems_;
};

} // namespace symmax

#endif // SYMMAX_ERRORS_HPP

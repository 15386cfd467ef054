#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dnp {

/// Base of every error raised by the library. `kind()` is a stable machine
/// name used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define DNP_DECLARE_ERROR(Name)                                   \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

DNP_DECLARE_ERROR(DomainError);
DNP_DECLARE_ERROR(ConvergenceError);
DNP_DECLARE_ERROR(QuadratureError);
DNP_DECLARE_ERROR(ShapeError);
DNP_DECLARE_ERROR(MissingMetadata);
DNP_DECLARE_ERROR(PreconditionError);
DNP_DECLARE_ERROR(InsufficientData);
DNP_DECLARE_ERROR(NonconvergedLadder);
DNP_DECLARE_ERROR(NotSettled);

#undef DNP_DECLARE_ERROR

/// Inner Newton solve failed. Carries the last iterate and the residual
/// history so callers can decide on step rejection.
class NewtonDivergence : public Error {
 public:
  NewtonDivergence(const std::string& what, std::vector<double> last_iterate,
                   std::vector<double> residual_history)
      : Error("NewtonDivergence", what),
        last_iterate_(std::move(last_iterate)),
        residual_history_(std::move(residual_history)) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  const std::vector<double>& residual_history() const noexcept { return residual_history_; }

 private:
  std::vector<double> last_iterate_;
  std::vector<double> residual_history_;
};

/// Discrete Gronwall hypothesis fails at index `first_failing`.
class HypothesisViolated : public Error {
 public:
  HypothesisViolated(const std::string& what, std::size_t first_failing)
      : Error("HypothesisViolated", what), first_failing_(first_failing) {}
  std::size_t first_failing() const noexcept { return first_failing_; }

 private:
  std::size_t first_failing_;
};

/// Config text is malformed. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string key, int line)
      : Error("ParseError", what), key_(std::move(key)), line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Config is well formed but violates a structural hypothesis. `tag` is one
/// of H1..H7, S0, f1, f2, LS.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::string tag)
      : Error("ValidationError", what), tag_(std::move(tag)) {}
  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

}  // namespace dnp

#pragma once

#include <stdexcept>
#include <string>

namespace ruleagg {

enum class ErrorKind {
  kSchemaMismatch,
  kUnknownCategory,
  kIntegrity,
  kUnsupportedTask,
  kInvalidBatch,
  kCannotFit,
  kInvalidArgument,
  kParse,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; `kind` lets callers (the CLI in
// particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // True for problems with the caller's inputs, as opposed to a stage that
  // could not produce a result from valid inputs.
  bool is_input_error() const noexcept { return kind_ != ErrorKind::kCannotFit; }

 private:
  ErrorKind kind_;
};

}  // namespace ruleagg

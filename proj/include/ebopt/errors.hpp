#pragma once

#include <stdexcept>
#include <string>

namespace ebopt {

/// Broad failure classes; the CLI maps these onto exit codes.
enum class ErrorKind {
  ContractViolation,
  InvalidInput,
  InvalidStiffness,
  InvalidConfig,
  Parse,
  GridMismatch,
  NumericalFailure,
  Divergence,
  StepFailure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures raised while integrating or optimizing, as opposed to
  /// bad inputs.
  bool is_numerical() const noexcept {
    return kind_ == ErrorKind::NumericalFailure ||
           kind_ == ErrorKind::Divergence || kind_ == ErrorKind::StepFailure;
  }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) throw Error(kind, msg);
}

}  // namespace ebopt

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crn {

enum class ErrorCode {
  Syntax,
  Rate,
  UnknownSpecies,
  Empty,
  Dim,
  Neg,
  Step,
  NoConv,
  NegC,
  Dt,
  Box,
  EmptySector,
  Overflow,
  Explode,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "E_SYNTAX";
    case ErrorCode::Rate: return "E_RATE";
    case ErrorCode::UnknownSpecies: return "E_UNKNOWN_SPECIES";
    case ErrorCode::Empty: return "E_EMPTY";
    case ErrorCode::Dim: return "E_DIM";
    case ErrorCode::Neg: return "E_NEG";
    case ErrorCode::Step: return "E_STEP";
    case ErrorCode::NoConv: return "E_NOCONV";
    case ErrorCode::NegC: return "E_NEGC";
    case ErrorCode::Dt: return "E_DT";
    case ErrorCode::Box: return "E_BOX";
    case ErrorCode::EmptySector: return "E_EMPTY_SECTOR";
    case ErrorCode::Overflow: return "E_OVERFLOW";
    case ErrorCode::Explode: return "E_EXPLODE";
  }
  return "E_UNKNOWN";
}

// All domain failures surface as crn::Error; the code is what callers
// (and the CLI exit status) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crn

#pragma once

#include <stdexcept>
#include <string>

namespace superhedge {

/// Failure classes. The CLI maps these onto exit codes.
enum class ErrorCategory { Io, Validation, Solver, Verification };

class Error : public std::runtime_error {
public:
  Error(ErrorCategory category, const std::string &what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

private:
  ErrorCategory category_;
};

#define SUPERHEDGE_DEFINE_ERROR(Name, Category)                               \
  class Name : public Error {                                                 \
  public:                                                                     \
    explicit Name(const std::string &what)                                    \
        : Error(ErrorCategory::Category, #Name ": " + what) {}                 \
  };

SUPERHEDGE_DEFINE_ERROR(IoError, Io)
SUPERHEDGE_DEFINE_ERROR(MalformedTree, Validation)
SUPERHEDGE_DEFINE_ERROR(ShapeMismatch, Validation)
SUPERHEDGE_DEFINE_ERROR(TimeOutOfRange, Validation)
SUPERHEDGE_DEFINE_ERROR(InvalidModel, Validation)
SUPERHEDGE_DEFINE_ERROR(CrossedBook, Validation)
SUPERHEDGE_DEFINE_ERROR(NonMonotoneLadder, Validation)
SUPERHEDGE_DEFINE_ERROR(NegativeDeflator, Validation)
SUPERHEDGE_DEFINE_ERROR(PolarOfNonCone, Validation)
SUPERHEDGE_DEFINE_ERROR(NonpositivePrice, Validation)
SUPERHEDGE_DEFINE_ERROR(NoNumeraire, Validation)
SUPERHEDGE_DEFINE_ERROR(ZeroPremium, Validation)
SUPERHEDGE_DEFINE_ERROR(ConicalOnly, Validation)
SUPERHEDGE_DEFINE_ERROR(UndefinedBase, Verification)
SUPERHEDGE_DEFINE_ERROR(NumericalFailure, Solver)
SUPERHEDGE_DEFINE_ERROR(SlopeNotStabilized, Solver)
SUPERHEDGE_DEFINE_ERROR(GapTooLarge, Verification)

#undef SUPERHEDGE_DEFINE_ERROR

} // namespace superhedge

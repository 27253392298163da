#pragma once

#include <stdexcept>
#include <string>

namespace qpdec {

// Input / parse failures (CLI exit code 2).
struct SyntaxError : std::runtime_error {
  explicit SyntaxError(const std::string& m) : std::runtime_error("SyntaxError: " + m) {}
};
struct DegreeError : std::runtime_error {
  explicit DegreeError(const std::string& m) : std::runtime_error("DegreeError: " + m) {}
};
struct UnknownVariable : std::runtime_error {
  explicit UnknownVariable(const std::string& m) : std::runtime_error("UnknownVariable: " + m) {}
};
struct BothZero : std::runtime_error {
  explicit BothZero(const std::string& m) : std::runtime_error("BothZero: " + m) {}
};
struct PreconditionViolated : std::runtime_error {
  explicit PreconditionViolated(const std::string& m) : std::runtime_error("PreconditionViolated: " + m) {}
};
struct SingularTransform : std::runtime_error {
  explicit SingularTransform(const std::string& m) : std::runtime_error("SingularTransform: " + m) {}
};
struct NonIntegerCoefficients : std::runtime_error {
  explicit NonIntegerCoefficients(const std::string& m) : std::runtime_error("NonIntegerCoefficients: " + m) {}
};
struct UnsupportedClass : std::runtime_error {
  explicit UnsupportedClass(const std::string& m) : std::runtime_error("UnsupportedClass: " + m) {}
};
struct DegenerateInput : std::runtime_error {
  explicit DegenerateInput(const std::string& m) : std::runtime_error("DegenerateInput: " + m) {}
};
struct BadSampleCount : std::runtime_error {
  explicit BadSampleCount(const std::string& m) : std::runtime_error("BadSampleCount: " + m) {}
};

// Scale / resource failures (CLI exit code 3).
struct ScaleTooLarge : std::runtime_error {
  explicit ScaleTooLarge(const std::string& m) : std::runtime_error("ScaleTooLarge: " + m) {}
};
struct PackingOverflow : std::runtime_error {
  explicit PackingOverflow(const std::string& m) : std::runtime_error("PackingOverflow: " + m) {}
};
struct MemoryBudgetExceeded : std::runtime_error {
  explicit MemoryBudgetExceeded(const std::string& m) : std::runtime_error("MemoryBudgetExceeded: " + m) {}
};
struct PrecisionLoss : std::runtime_error {
  explicit PrecisionLoss(const std::string& m) : std::runtime_error("PrecisionLoss: " + m) {}
};

// An arithmetic identity that should hold by construction failed; always a bug.
struct InternalInconsistency : std::logic_error {
  explicit InternalInconsistency(const std::string& m) : std::logic_error("InternalInconsistency: " + m) {}
};

}  // namespace qpdec

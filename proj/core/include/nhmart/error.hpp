#pragma once

#include <stdexcept>
#include <string>

namespace nhmart {

enum class ErrorKind {
  MeasureMismatch,
  CycleDetected,
  NonPositiveMeasure,
  GenerationOrder,
  SingleChild,
  UnknownNode,
  UnknownParent,
  DuplicateId,
  LeafNode,
  LatticeMismatch,
  ZeroMeanViolated,
  NegativeInput,
  NoParent,
  NoBlock,
  BadExponent,
  BadArgument,
  IoError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nhmart

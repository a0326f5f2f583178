#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fedhgn {

enum class ErrorKind {
  DimensionMismatch,
  ShapeMismatch,
  EmptyGraph,
  TooLarge,
  NoLabels,
  RatioOverflow,
  InvalidArgument,
  MissingLayer,
  LayerSkew,
  IncompleteRound,
  DuplicateUpload,
  CountMismatch,
  ProtocolViolation,
  MalformedFrame,
  UnknownTag,
  LengthMismatch,
  EmptyMask,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers and tests can
// branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fedhgn

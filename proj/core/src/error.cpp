#include "fedhgn/error.hpp"

namespace fedhgn {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::EmptyGraph: return "EmptyGraph";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NoLabels: return "NoLabels";
    case ErrorKind::RatioOverflow: return "RatioOverflow";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MissingLayer: return "MissingLayer";
    case ErrorKind::LayerSkew: return "LayerSkew";
    case ErrorKind::IncompleteRound: return "IncompleteRound";
    case ErrorKind::DuplicateUpload: return "DuplicateUpload";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::ProtocolViolation: return "ProtocolViolation";
    case ErrorKind::MalformedFrame: return "MalformedFrame";
    case ErrorKind::UnknownTag: return "UnknownTag";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace fedhgn

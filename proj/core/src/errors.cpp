#include "navcurate/errors.hpp"

namespace navcurate {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::EmptyResult: return "EmptyResult";
    case ErrorKind::GimbalDegenerate: return "GimbalDegenerate";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::AllUndefined: return "AllUndefined";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
  }
  return "Error";
}

}  // namespace navcurate

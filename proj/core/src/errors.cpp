#include "jca/errors.hpp"

namespace jca {

const char* to_string(FormatError::Kind kind) {
  switch (kind) {
    case FormatError::Kind::BadMagic: return "bad magic";
    case FormatError::Kind::Truncated: return "truncated";
    case FormatError::Kind::VersionMismatch: return "version mismatch";
    case FormatError::Kind::Malformed: return "malformed";
    case FormatError::Kind::OutOfRange: return "out of range";
  }
  return "unknown";
}

}  // namespace jca

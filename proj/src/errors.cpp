#include "learnpath/errors.hpp"

namespace learnpath {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kInvalidTerm:
      return "invalid_term";
    case Errc::kInvalidParameter:
      return "invalid_parameter";
    case Errc::kParse:
      return "parse_error";
    case Errc::kDuplicateDefinition:
      return "duplicate_definition";
    case Errc::kNotFound:
      return "not_found";
    case Errc::kValidation:
      return "validation_error";
    case Errc::kEmptyNeighborhood:
      return "empty_neighborhood";
    case Errc::kNoPath:
      return "no_path";
    case Errc::kOracleTooLarge:
      return "oracle_too_large";
    case Errc::kIo:
      return "io_error";
  }
  return "unknown";
}

}  // namespace learnpath

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace learnpath {

enum class Errc {
  kInvalidTerm,
  kInvalidParameter,
  kParse,
  kDuplicateDefinition,
  kNotFound,
  kValidation,
  kEmptyNeighborhood,
  kNoPath,
  kOracleTooLarge,
  kIo,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Raised when no ant (or the oracle) completes a tour. `frontier` holds the
// terms where construction got stuck.
class NoPathError : public Error {
 public:
  NoPathError(const std::string& what, std::vector<std::string> frontier)
      : Error(Errc::kNoPath, what), frontier_(std::move(frontier)) {}

  const std::vector<std::string>& frontier() const noexcept { return frontier_; }

 private:
  std::vector<std::string> frontier_;
};

}  // namespace learnpath

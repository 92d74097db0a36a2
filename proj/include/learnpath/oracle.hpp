#pragma once

#include <cstdint>
#include <string_view>

#include "learnpath/aco.hpp"

namespace learnpath {

inline constexpr std::uint64_t kOracleExpansionLimit = std::uint64_t{1} << 20;

struct OracleResult {
  LearningPath best;
  AntTour best_tour;
  std::uint64_t paths_found = 0;
  // Paths sharing the optimum's association count and length.
  std::uint64_t optimal_paths = 0;
  std::uint64_t expansions = 0;
};

// Enumerates every simple reverse path from `query` to Root or a known term
// that passes the data-list gate, ignoring the association-first step rule,
// and keeps the best under tour_better. Throws kOracleTooLarge once more than
// `expansion_limit` partial paths have been generated, NoPathError when none
// completes.
OracleResult brute_force_oracle(const FPGraph& graph, std::string_view query, const KnownSet& known,
                                std::uint64_t expansion_limit = kOracleExpansionLimit);

}  // namespace learnpath

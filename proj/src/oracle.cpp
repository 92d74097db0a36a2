#include "learnpath/oracle.hpp"

#include <optional>
#include <set>

#include "learnpath/errors.hpp"

namespace learnpath {

namespace {

class Enumerator {
 public:
  Enumerator(const FPGraph& graph, const KnownSet& known, std::uint64_t limit)
      : graph_(graph), known_(known), limit_(limit) {}

  void run(std::string_view query) {
    tour_.visited.emplace_back(query);
    descend();
  }

  std::optional<AntTour> best;
  std::set<std::string> frontier;
  std::uint64_t paths = 0;
  std::uint64_t tied = 0;
  std::uint64_t expansions = 0;

 private:
  void descend() {
    const auto candidates = feasible_neighborhood(graph_, tour_);
    if (candidates.empty()) {
      frontier.insert(tour_.visited.back());
      return;
    }
    for (const EdgeStats& edge : candidates) {
      if (++expansions > limit_) {
        throw Error(Errc::kOracleTooLarge,
                    "oracle exceeded " + std::to_string(limit_) + " partial paths; graph is too large");
      }
      tour_.visited.push_back(edge.from);
      if (edge.is_association) ++tour_.association_count;
      if (edge.from == kRootTerm || known_.contains(edge.from)) {
        tour_.outcome = edge.from == kRootTerm ? TourOutcome::kReachedRoot : TourOutcome::kReachedKnown;
        ++paths;
        record();
        tour_.outcome = TourOutcome::kDeadEnd;
      } else {
        descend();
      }
      if (edge.is_association) --tour_.association_count;
      tour_.visited.pop_back();
    }
  }

  // Ties count paths equal to the best on associations and length.
  void record() {
    const bool same_tier = best && best->association_count == tour_.association_count &&
                           best->visited.size() == tour_.visited.size();
    if (same_tier) {
      ++tied;
      if (tour_better(tour_, *best)) best = tour_;
    } else if (!best || tour_better(tour_, *best)) {
      best = tour_;
      tied = 1;
    }
  }

  const FPGraph& graph_;
  const KnownSet& known_;
  std::uint64_t limit_;
  AntTour tour_;
};

}  // namespace

OracleResult brute_force_oracle(const FPGraph& graph, std::string_view query, const KnownSet& known,
                                std::uint64_t expansion_limit) {
  if (query == kRootTerm) throw Error(Errc::kInvalidTerm, "Root cannot be queried");
  if (!graph.contains(query)) throw Error(Errc::kNotFound, "unknown term '" + std::string(query) + "'");
  if (known.contains(query)) throw Error(Errc::kInvalidParameter, "query '" + std::string(query) + "' is already known");

  Enumerator e(graph, known, expansion_limit);
  e.run(query);
  if (!e.best) {
    throw NoPathError("no feasible path from '" + std::string(query) + "'",
                      std::vector<std::string>(e.frontier.begin(), e.frontier.end()));
  }
  return OracleResult{to_learning_path(*e.best, graph, nullptr), *e.best, e.paths, e.tied, e.expansions};
}

}  // namespace learnpath

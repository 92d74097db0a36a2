#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "learnpath/fp_graph.hpp"

namespace learnpath {

using KnownSet = std::set<std::string, std::less<>>;

struct ACOParams {
  double alpha = 1.0;   // pheromone exponent
  double beta = 1.0;    // attractiveness exponent
  double rho = 1.0;     // trail persistence, 1 means no evaporation
  double q_factor = 1.0;
  double tau0 = 1.0;
  std::uint32_t n_ants = 20;
  std::uint32_t max_iterations = 50;
  std::uint32_t stagnation_window = 10;
  std::uint64_t seed = 0;
  // Take the max-frequency edge when no association is reachable instead of
  // sampling over the whole neighbourhood.
  bool greedy_fallback = false;

  void validate() const;
};

nlohmann::json to_json(const ACOParams& params);
// Overlays the keys present in `overrides` onto `base`, then validates.
ACOParams merge_params(ACOParams base, const nlohmann::json& overrides);

class PheromoneTable {
 public:
  static PheromoneTable initialize(const FPGraph& graph, double tau0);

  double tau(const EdgeKey& edge) const;
  double tau(std::string_view from, std::string_view to) const;
  void set_tau(const EdgeKey& edge, double value);
  std::uint64_t iteration() const noexcept { return iteration_; }
  const std::map<EdgeKey, double>& values() const noexcept { return tau_; }

  void advance() { ++iteration_; }

 private:
  std::map<EdgeKey, double> tau_;
  std::uint64_t iteration_ = 0;
};

enum class TourOutcome { kReachedRoot, kReachedKnown, kDeadEnd };

std::string_view tour_outcome_name(TourOutcome outcome);

// One ant's walk from the query towards Root, against edge direction.
// visited[0] is the query; each step visited[i] -> visited[i+1] follows the
// graph edge visited[i+1] -> visited[i].
struct AntTour {
  std::uint32_t ant_id = 0;
  std::vector<std::string> visited;
  std::uint32_t association_count = 0;
  TourOutcome outcome = TourOutcome::kDeadEnd;

  bool complete() const { return outcome != TourOutcome::kDeadEnd; }
  bool contains_edge(const EdgeKey& edge) const;
  bool operator==(const AntTour&) const = default;
};

struct PathEdge {
  std::string from;
  std::string to;
  std::uint64_t frequency = 0;
  bool is_association = false;
  double tau = 0.0;

  bool operator==(const PathEdge&) const = default;
};

struct LearningPath {
  std::string query;
  // Root-side endpoint first, query last.
  std::vector<std::string> path;
  std::set<std::string> recommended;
  std::uint32_t association_count = 0;
  std::uint32_t iterations_run = 0;
  std::uint32_t tours_attempted = 0;
  std::vector<PathEdge> edges;

  bool operator==(const LearningPath&) const = default;
};

nlohmann::json to_json(const LearningPath& lp);

// N_i^k for the ant's current node. The gate term is the tour's query.
std::vector<EdgeRef> feasible_neighborhood(const FPGraph& graph, const AntTour& tour);

// P_ij^k aligned with `candidates`. Throws kEmptyNeighborhood when empty.
std::vector<double> transition_probabilities(const PheromoneTable& pheromone, std::span<const EdgeRef> candidates,
                                             const ACOParams& params);

// Probability of stepping along `edge`; exactly 0 when it is not a candidate.
double transition_probability(const PheromoneTable& pheromone, std::span<const EdgeRef> candidates,
                              const ACOParams& params, const EdgeKey& edge);

// Deterministic per-ant stream derived from (seed, iteration, ant).
std::mt19937_64 ant_stream(std::uint64_t seed, std::uint64_t iteration, std::uint64_t ant);

AntTour construct_tour(const FPGraph& graph, const PheromoneTable& pheromone, const ACOParams& params,
                       std::string_view query, const KnownSet& known, std::mt19937_64& rng,
                       std::uint32_t ant_id = 0);

std::uint32_t count_associations(const AntTour& tour, const FPGraph& graph);

// tau <- rho * tau + sum over tours using the edge of Q * C^k. DeadEnd tours
// are skipped.
void update_trail(PheromoneTable& pheromone, std::span<const AntTour> tours, const ACOParams& params);

// Orders complete tours by (most associations, shortest, lexicographic).
bool tour_better(const AntTour& a, const AntTour& b);
const AntTour& select_best(std::span<const AntTour> tours);

struct LearningPathRun {
  LearningPath result;
  PheromoneTable pheromone;
  AntTour best;
};

LearningPathRun run_learning_path(const FPGraph& graph, std::string_view query, const KnownSet& known,
                                  const ACOParams& params);
LearningPath learning_path(const FPGraph& graph, std::string_view query, const KnownSet& known,
                           const ACOParams& params);

// Reverses a tour into a LearningPath; `pheromone` may be null.
LearningPath to_learning_path(const AntTour& tour, const FPGraph& graph, const PheromoneTable* pheromone);

}  // namespace learnpath

#include "learnpath/aco.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "learnpath/errors.hpp"

namespace learnpath {

namespace {

using nlohmann::json;

// Uniform double in [0, 1) from the top 53 bits, independent of the
// standard library's distribution implementation.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t sample_index(std::span<const double> probabilities, std::mt19937_64& rng) {
  const double u = unit_uniform(rng);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    cumulative += probabilities[i];
    if (u < cumulative) return i;
  }
  return probabilities.size() - 1;
}

double edge_weight(const PheromoneTable& pheromone, const EdgeStats& edge, const ACOParams& params) {
  return std::pow(pheromone.tau(edge.from, edge.to), params.alpha) *
         std::pow(static_cast<double>(edge.frequency), params.beta);
}

}  // namespace

void ACOParams::validate() const {
  const auto bad = [](const std::string& what) { throw Error(Errc::kInvalidParameter, what); };
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) bad("alpha must be a finite value >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) bad("beta must be a finite value >= 0");
  if (!(rho > 0.0 && rho <= 1.0)) bad("rho must lie in (0, 1]");
  if (!(q_factor > 0.0) || !std::isfinite(q_factor)) bad("q must be > 0");
  if (!(tau0 > 0.0) || !std::isfinite(tau0)) bad("tau0 must be > 0");
  if (n_ants < 1) bad("ants must be >= 1");
  if (max_iterations < 1) bad("iterations must be >= 1");
  if (stagnation_window < 1) bad("stagnation must be >= 1");
}

json to_json(const ACOParams& p) {
  return {{"alpha", p.alpha},
          {"beta", p.beta},
          {"rho", p.rho},
          {"q", p.q_factor},
          {"tau0", p.tau0},
          {"ants", p.n_ants},
          {"iterations", p.max_iterations},
          {"stagnation", p.stagnation_window},
          {"seed", p.seed},
          {"greedy_fallback", p.greedy_fallback}};
}

ACOParams merge_params(ACOParams base, const json& overrides) {
  if (overrides.is_null()) {
    base.validate();
    return base;
  }
  if (!overrides.is_object()) throw Error(Errc::kInvalidParameter, "params must be a JSON object");
  try {
    for (const auto& [key, value] : overrides.items()) {
      if (key == "alpha") {
        base.alpha = value.get<double>();
      } else if (key == "beta") {
        base.beta = value.get<double>();
      } else if (key == "rho") {
        base.rho = value.get<double>();
      } else if (key == "q") {
        base.q_factor = value.get<double>();
      } else if (key == "tau0") {
        base.tau0 = value.get<double>();
      } else if (key == "ants") {
        base.n_ants = value.get<std::uint32_t>();
      } else if (key == "iterations") {
        base.max_iterations = value.get<std::uint32_t>();
      } else if (key == "stagnation") {
        base.stagnation_window = value.get<std::uint32_t>();
      } else if (key == "seed") {
        base.seed = value.get<std::uint64_t>();
      } else if (key == "greedy_fallback") {
        base.greedy_fallback = value.get<bool>();
      } else {
        throw Error(Errc::kInvalidParameter, "unknown parameter '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kInvalidParameter, std::string("bad parameter value: ") + e.what());
  }
  base.validate();
  return base;
}

PheromoneTable PheromoneTable::initialize(const FPGraph& graph, double tau0) {
  if (!(tau0 > 0.0) || !std::isfinite(tau0)) throw Error(Errc::kInvalidParameter, "tau0 must be > 0");
  PheromoneTable table;
  for (const auto& [key, edge] : graph.edges()) table.tau_.emplace(key, tau0);
  return table;
}

double PheromoneTable::tau(const EdgeKey& edge) const {
  const auto it = tau_.find(edge);
  if (it == tau_.end()) throw Error(Errc::kNotFound, "no trail for edge '" + edge.from + "' -> '" + edge.to + "'");
  return it->second;
}

double PheromoneTable::tau(std::string_view from, std::string_view to) const {
  return tau(EdgeKey{std::string(from), std::string(to)});
}

void PheromoneTable::set_tau(const EdgeKey& edge, double value) {
  const auto it = tau_.find(edge);
  if (it == tau_.end()) throw Error(Errc::kNotFound, "no trail for edge '" + edge.from + "' -> '" + edge.to + "'");
  it->second = value;
}

std::string_view tour_outcome_name(TourOutcome outcome) {
  switch (outcome) {
    case TourOutcome::kReachedRoot:
      return "reached_root";
    case TourOutcome::kReachedKnown:
      return "reached_known";
    case TourOutcome::kDeadEnd:
      return "dead_end";
  }
  return "dead_end";
}

bool AntTour::contains_edge(const EdgeKey& edge) const {
  for (std::size_t i = 0; i + 1 < visited.size(); ++i) {
    if (visited[i + 1] == edge.from && visited[i] == edge.to) return true;
  }
  return false;
}

std::vector<EdgeRef> feasible_neighborhood(const FPGraph& graph, const AntTour& tour) {
  std::vector<EdgeRef> out;
  if (tour.visited.empty()) return out;
  const std::string& query = tour.visited.front();
  for (const EdgeStats& edge : graph.predecessors(tour.visited.back())) {
    if (std::find(tour.visited.begin(), tour.visited.end(), edge.from) != tour.visited.end()) continue;
    if (edge.from == kRootTerm || graph.node(edge.from).data_list.contains(query)) out.emplace_back(edge);
  }
  return out;
}

std::vector<double> transition_probabilities(const PheromoneTable& pheromone, std::span<const EdgeRef> candidates,
                                             const ACOParams& params) {
  if (candidates.empty()) throw Error(Errc::kEmptyNeighborhood, "feasible neighbourhood is empty");
  std::vector<double> weights;
  weights.reserve(candidates.size());
  double total = 0.0;
  for (const EdgeStats& edge : candidates) {
    weights.push_back(edge_weight(pheromone, edge, params));
    total += weights.back();
  }
  for (auto& w : weights) w /= total;
  return weights;
}

double transition_probability(const PheromoneTable& pheromone, std::span<const EdgeRef> candidates,
                              const ACOParams& params, const EdgeKey& edge) {
  const auto it = std::find_if(candidates.begin(), candidates.end(),
                               [&](const EdgeStats& c) { return c.from == edge.from && c.to == edge.to; });
  if (it == candidates.end()) return 0.0;
  return transition_probabilities(pheromone, candidates, params)[static_cast<std::size_t>(it - candidates.begin())];
}

std::mt19937_64 ant_stream(std::uint64_t seed, std::uint64_t iteration, std::uint64_t ant) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(iteration), static_cast<std::uint32_t>(ant)};
  return std::mt19937_64(seq);
}

AntTour construct_tour(const FPGraph& graph, const PheromoneTable& pheromone, const ACOParams& params,
                       std::string_view query, const KnownSet& known, std::mt19937_64& rng, std::uint32_t ant_id) {
  if (query == kRootTerm) throw Error(Errc::kInvalidTerm, "Root cannot be queried");
  if (!graph.contains(query)) throw Error(Errc::kNotFound, "unknown term '" + std::string(query) + "'");
  if (known.contains(query)) throw Error(Errc::kInvalidParameter, "query '" + std::string(query) + "' is already known");

  AntTour tour;
  tour.ant_id = ant_id;
  tour.visited.emplace_back(query);
  for (;;) {
    const auto candidates = feasible_neighborhood(graph, tour);
    if (candidates.empty()) {
      tour.outcome = TourOutcome::kDeadEnd;
      return tour;
    }
    std::vector<EdgeRef> associations;
    std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(associations),
                 [](const EdgeStats& e) { return e.is_association; });

    const EdgeStats* next = nullptr;
    if (!associations.empty()) {
      const auto probs = transition_probabilities(pheromone, associations, params);
      next = &associations[sample_index(probs, rng)].get();
    } else if (params.greedy_fallback) {
      // Candidates arrive sorted by source term, so the first maximum wins ties.
      next = &std::max_element(candidates.begin(), candidates.end(), [](const EdgeStats& a, const EdgeStats& b) {
                return a.frequency < b.frequency;
              })->get();
    } else {
      const auto probs = transition_probabilities(pheromone, candidates, params);
      next = &candidates[sample_index(probs, rng)].get();
    }

    tour.visited.push_back(next->from);
    if (next->is_association) ++tour.association_count;
    if (next->from == kRootTerm) {
      tour.outcome = TourOutcome::kReachedRoot;
      return tour;
    }
    if (known.contains(next->from)) {
      tour.outcome = TourOutcome::kReachedKnown;
      return tour;
    }
  }
}

std::uint32_t count_associations(const AntTour& tour, const FPGraph& graph) {
  std::uint32_t count = 0;
  for (std::size_t i = 0; i + 1 < tour.visited.size(); ++i) {
    const EdgeStats* edge = graph.find_edge(tour.visited[i + 1], tour.visited[i]);
    if (edge == nullptr) {
      throw Error(Errc::kValidation, "tour step '" + tour.visited[i] + "' <- '" + tour.visited[i + 1] +
                                         "' is not a graph edge");
    }
    if (edge->is_association) ++count;
  }
  return count;
}

void update_trail(PheromoneTable& pheromone, std::span<const AntTour> tours, const ACOParams& params) {
  std::map<EdgeKey, double> deposit;
  for (const auto& tour : tours) {
    if (!tour.complete()) continue;
    const double amount = params.q_factor * static_cast<double>(tour.association_count);
    for (std::size_t i = 0; i + 1 < tour.visited.size(); ++i) {
      deposit[EdgeKey{tour.visited[i + 1], tour.visited[i]}] += amount;
    }
  }
  for (const auto& [key, value] : pheromone.values()) {
    double next = params.rho * value;
    if (const auto it = deposit.find(key); it != deposit.end()) next += it->second;
    pheromone.set_tau(key, next);
  }
  pheromone.advance();
}

bool tour_better(const AntTour& a, const AntTour& b) {
  if (a.association_count != b.association_count) return a.association_count > b.association_count;
  if (a.visited.size() != b.visited.size()) return a.visited.size() < b.visited.size();
  return a.visited < b.visited;
}

const AntTour& select_best(std::span<const AntTour> tours) {
  const AntTour* best = nullptr;
  for (const auto& t : tours) {
    if (t.complete() && (best == nullptr || tour_better(t, *best))) best = &t;
  }
  if (best == nullptr) throw NoPathError("every tour ended in a dead end", {});
  return *best;
}

LearningPath to_learning_path(const AntTour& tour, const FPGraph& graph, const PheromoneTable* pheromone) {
  LearningPath lp;
  lp.query = tour.visited.front();
  lp.path.assign(tour.visited.rbegin(), tour.visited.rend());
  if (lp.path.size() > 2) lp.recommended.insert(lp.path.begin() + 1, lp.path.end() - 1);
  lp.association_count = tour.association_count;
  for (std::size_t i = 0; i + 1 < lp.path.size(); ++i) {
    const EdgeStats* edge = graph.find_edge(lp.path[i], lp.path[i + 1]);
    if (edge == nullptr) throw Error(Errc::kValidation, "path edge missing from graph");
    lp.edges.push_back(PathEdge{edge->from, edge->to, edge->frequency, edge->is_association,
                                pheromone != nullptr ? pheromone->tau(edge->key()) : 0.0});
  }
  return lp;
}

LearningPathRun run_learning_path(const FPGraph& graph, std::string_view query, const KnownSet& known,
                                  const ACOParams& params) {
  params.validate();
  if (query == kRootTerm) throw Error(Errc::kInvalidTerm, "Root cannot be queried");
  if (!graph.contains(query)) throw Error(Errc::kNotFound, "unknown term '" + std::string(query) + "'");

  auto pheromone = PheromoneTable::initialize(graph, params.tau0);
  std::optional<AntTour> best;
  std::set<std::string> frontier;
  std::uint32_t unchanged = 0;
  std::uint32_t iterations = 0;
  std::uint32_t attempted = 0;

  std::vector<AntTour> tours(params.n_ants);
  while (iterations < params.max_iterations) {
    // Ants only read the graph and the trail snapshot, and each owns its
    // stream, so the order they run in cannot change the outcome.
    for (std::uint32_t k = 0; k < params.n_ants; ++k) {
      auto rng = ant_stream(params.seed, iterations, k);
      tours[k] = construct_tour(graph, pheromone, params, query, known, rng, k);
    }
    attempted += params.n_ants;
    ++iterations;

    const AntTour* iteration_best = nullptr;
    for (const auto& t : tours) {
      if (!t.complete()) {
        frontier.insert(t.visited.back());
      } else if (iteration_best == nullptr || tour_better(t, *iteration_best)) {
        iteration_best = &t;
      }
    }
    if (iteration_best != nullptr && (!best || tour_better(*iteration_best, *best))) {
      best = *iteration_best;
      unchanged = 0;
    } else {
      ++unchanged;
    }
    update_trail(pheromone, tours, params);
    if (unchanged >= params.stagnation_window) break;
  }

  if (!best) {
    throw NoPathError("no ant reached Root or a known term from '" + std::string(query) + "'",
                      std::vector<std::string>(frontier.begin(), frontier.end()));
  }
  LearningPathRun run{to_learning_path(*best, graph, &pheromone), std::move(pheromone), *best};
  run.result.iterations_run = iterations;
  run.result.tours_attempted = attempted;
  return run;
}

LearningPath learning_path(const FPGraph& graph, std::string_view query, const KnownSet& known,
                           const ACOParams& params) {
  return run_learning_path(graph, query, known, params).result;
}

json to_json(const LearningPath& lp) {
  json edges = json::array();
  for (const auto& e : lp.edges) {
    edges.push_back(
        {{"from", e.from}, {"to", e.to}, {"frequency", e.frequency}, {"association", e.is_association}, {"tau", e.tau}});
  }
  return {{"query", lp.query},
          {"path", lp.path},
          {"recommended", std::vector<std::string>(lp.recommended.begin(), lp.recommended.end())},
          {"associations", lp.association_count},
          {"iterations", lp.iterations_run},
          {"tours", lp.tours_attempted},
          {"edges", std::move(edges)}};
}

}  // namespace learnpath

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "learnpath/aco.hpp"
#include "learnpath/errors.hpp"
#include "learnpath/oracle.hpp"
#include "test_support.hpp"

using namespace learnpath;
using namespace learnpath::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first few failures for the summary line.
class Failures {
 public:
  void add(const std::string& what) {
    if (++count_ <= 3) log_ << (count_ > 1 ? "; " : "") << what;
  }
  int count() const { return count_; }
  std::string text() const { return log_.str(); }

 private:
  int count_ = 0;
  std::ostringstream log_;
};

std::string fmt_ms(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f ms", s * 1e3);
  return buf;
}

std::string fmt_s(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

const std::string kRoot{kRootTerm};

Outcome criterion_1() {
  const auto start = Clock::now();
  FPGraph g(3);
  g.insert_branch(def_txn("a", {"b", "c", "d"}));
  g.insert_branch(def_txn("g", {"e", "f", "c"}));

  std::set<std::string> nodes;
  for (const auto& [t, n] : g.nodes()) nodes.insert(t);
  std::set<std::pair<std::string, std::string>> edges;
  bool all_one = true;
  for (const auto& [k, e] : g.edges()) {
    edges.emplace(k.from, k.to);
    all_one = all_one && e.frequency == 1;
  }
  const bool ok = nodes == std::set<std::string>{kRoot, "a", "b", "c", "d", "e", "f", "g"} &&
                  edges == std::set<std::pair<std::string, std::string>>{{kRoot, "b"}, {"b", "c"}, {"c", "d"},
                                                                         {"d", "a"}, {kRoot, "e"}, {"e", "f"},
                                                                         {"f", "c"}, {"c", "g"}} &&
                  all_one && g.node("c").data_list == std::set<std::string>{"a", "g"};
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = ok && elapsed < 1e-3;
  o.detail = std::string(ok ? "exact match" : "structure mismatch") + ", " + fmt_ms(elapsed);
  return o;
}

Outcome criterion_2() {
  // Term -> data list, one entry per row of the case-study table.
  const std::map<std::string, std::set<std::string>> rows{
      {"atp", {"mitochondria"}},
      {"amino acid", {"ribosome", "protein"}},
      {"cell", {"mitochondria", "eukaryotic", "organelle", "dna", "nucleic acid", "cytoplasm", "ribosome"}},
      {"cytoplasm", {"mitochondria"}},
      {"dna", {"nucleic acid", "eukaryotic", "nucleus"}},
      {"organelle", {"mitochondria", "eukaryotic", "dna", "cytoplasm", "nucleus", "ribosome"}},
      {"eukaryotic", {"mitochondria", "cytoplasm", "nucleus"}},
      {"metabolism", {"eukaryotic"}},
      {"mitochondria", {"cytoplasm"}},
      {"molecule", {"nucleic acid"}},
      {"nucleus", {"eukaryotic", "dna", "cytoplasm"}},
      {"nucleic acid", {"dna"}},
      {"prokaryotic", {"cytoplasm"}},
      {"ribosome", {"cytoplasm"}},
      {"nucleotide", {"nucleic acid", "ribosome"}},
      {"protein", {"nucleic acid", "nucleus", "ribosome"}},
      {"rna", {"nucleic acid", "ribosome"}},
      {"genetic material", {"nucleus"}},
  };
  const std::set<std::string> required{"atp",     "cell",      "cytoplasm", "eukaryotic",
                                        "metabolism", "nucleus", "organelle", "mitochondria"};
  const FPGraph g = case_study_graph();
  Failures f;
  int required_ok = 0;
  for (const auto& [term, expected] : rows) {
    if (!g.contains(term)) {
      f.add(term + " missing");
      continue;
    }
    if (g.node(term).data_list != expected) {
      f.add(term + " data list differs");
      continue;
    }
    if (required.contains(term)) ++required_ok;
  }
  Outcome o;
  o.pass = required_ok == static_cast<int>(required.size());
  o.detail = std::to_string(rows.size() - static_cast<std::size_t>(f.count())) + "/" + std::to_string(rows.size()) +
             " rows exact, " + std::to_string(required_ok) + "/" + std::to_string(required.size()) + " required";
  if (f.count() > 0) o.detail += " (" + f.text() + ")";
  return o;
}

Outcome criterion_3() {
  const FPGraph g = case_study_graph();
  const std::map<std::string, std::set<std::string>> expected{
      {"mitochondria", {"atp", "cell", "eukaryotic", "organelle"}},
      {"eukaryotic", {"cell", "metabolism", "nucleus", "organelle"}},
  };
  Outcome o;
  double slowest = 0;
  for (const auto& [query, want] : expected) {
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      ACOParams p;
      p.seed = seed;
      const auto start = Clock::now();
      bool hit = false;
      try {
        hit = learning_path(g, query, {}, p).recommended == want;
      } catch (const Error&) {
      }
      const double t = seconds_since(start);
      slowest = std::max(slowest, t);
      if (hit) ++hits;
    }
    o.pass = o.pass && hits >= 90;
    o.detail += query + " " + std::to_string(hits) + "/100, ";
  }
  o.pass = o.pass && slowest < 1.0;
  o.detail += "slowest run " + fmt_ms(slowest);
  return o;
}

Outcome criterion_4() {
  const auto start = Clock::now();
  std::mt19937_64 rng(0);
  int matches = 0;
  int contested = 0;
  Failures f;
  for (int i = 0; i < 100; ++i) {
    const auto fx = random_fixture(rng);
    const FPGraph& g = fx.graph;
    std::vector<std::string> terms;
    for (const auto& [t, n] : g.nodes()) {
      if (t != kRoot) terms.push_back(t);
    }
    std::shuffle(terms.begin(), terms.end(), rng);
    std::optional<OracleResult> oracle;
    std::string query;
    for (const auto& t : terms) {
      try {
        oracle = brute_force_oracle(g, t, {});
        query = t;
        break;
      } catch (const NoPathError&) {
      }
    }
    if (!oracle) {
      f.add("fixture " + std::to_string(i) + " has no answerable query");
      continue;
    }
    if (oracle->paths_found > 1) ++contested;
    ACOParams p;
    p.seed = 0;
    try {
      const auto lp = learning_path(g, query, {}, p);
      bool same = lp.association_count == oracle->best.association_count &&
                  lp.path.size() == oracle->best.path.size();
      if (same && oracle->optimal_paths == 1) same = lp.path == oracle->best.path;
      if (same) {
        ++matches;
      } else {
        f.add("fixture " + std::to_string(i) + " '" + query + "' aco " + std::to_string(lp.association_count) + "/" +
              std::to_string(lp.path.size()) + " vs oracle " + std::to_string(oracle->best.association_count) + "/" +
              std::to_string(oracle->best.path.size()));
      }
    } catch (const NoPathError&) {
      f.add("fixture " + std::to_string(i) + " '" + query + "' aco found no path");
    }
  }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = matches >= 95 && elapsed < 30.0;
  o.detail = std::to_string(matches) + "/100 match oracle (" + std::to_string(contested) +
             " with several feasible paths), " + fmt_s(elapsed);
  if (f.count() > 0) o.detail += " (" + f.text() + ")";
  return o;
}

// Random candidate edges p_i -> x with random frequencies and trails.
struct CandidateSet {
  FPGraph graph{1};
  PheromoneTable table;
  std::vector<EdgeRef> refs;
};

CandidateSet random_candidates(std::mt19937_64& rng, double tau_scale = 1.0, std::uint64_t freq_scale = 1) {
  const int n = 1 + static_cast<int>(rng() % 8);
  nlohmann::json nodes = nlohmann::json::array({{{"term", kRoot}, {"data_list", nlohmann::json::array()}},
                                                {{"term", "x"}, {"data_list", nlohmann::json::array()}}});
  nlohmann::json edges = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    const std::string p = "p" + std::to_string(i);
    nodes.push_back({{"term", p}, {"data_list", {"x"}}});
    edges.push_back({{"from", kRoot}, {"to", p}, {"frequency", 1}, {"association", false}});
    edges.push_back({{"from", p}, {"to", "x"}, {"frequency", (1 + rng() % 20) * freq_scale}, {"association", false}});
  }
  CandidateSet c;
  c.graph = FPGraph::restore({{"sigma", 1000}, {"nodes", nodes}, {"edges", edges}, {"unmatched", nlohmann::json::array()}});
  c.table = PheromoneTable::initialize(c.graph, 1.0);
  c.refs = c.graph.predecessors("x");
  std::uniform_real_distribution<double> tau(0.01, 10.0);
  for (int i = 0; i < n; ++i) c.table.set_tau(EdgeKey{"p" + std::to_string(i), "x"}, tau(rng) * tau_scale);
  return c;
}

Outcome criterion_5() {
  const auto start = Clock::now();
  constexpr int kCases = 1000;
  std::map<std::string, int> bad;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> exponent(0.0, 3.0);

  for (int i = 0; i < kCases; ++i) {
    ACOParams p;
    p.alpha = exponent(rng);
    p.beta = exponent(rng);
    const std::uint64_t state = rng();

    std::mt19937_64 a(state);
    const auto base = random_candidates(a);
    const auto probs = transition_probabilities(base.table, base.refs, p);
    double sum = 0;
    for (double x : probs) sum += x;
    if (std::abs(sum - 1.0) > 1e-12) ++bad["normalization"];

    const EdgeStats outsider{"z", "x", 3, false};
    if (transition_probability(base.table, base.refs, p, outsider.key()) != 0.0) ++bad["outside-neighbourhood"];

    std::mt19937_64 b(state);
    const double tau_scale = std::uniform_real_distribution<double>(0.1, 100.0)(rng);
    const std::uint64_t freq_scale = 1 + rng() % 10;
    const auto scaled = random_candidates(b, tau_scale, freq_scale);
    const auto probs2 = transition_probabilities(scaled.table, scaled.refs, p);
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (std::abs(probs[k] - probs2[k]) > 1e-12) {
        ++bad["scale-invariance"];
        break;
      }
    }
  }

  ACOParams defaults;
  for (int i = 0; i < kCases; ++i) {
    const auto fx = random_fixture(rng);
    const FPGraph& g = fx.graph;

    std::vector<std::string> terms;
    for (const auto& [t, n] : g.nodes()) {
      if (t != kRoot) terms.push_back(t);
    }
    const std::string query = terms[rng() % terms.size()];
    KnownSet known;
    if (rng() % 2 == 0) known.insert(terms[rng() % terms.size()]);
    known.erase(query);

    auto table = PheromoneTable::initialize(g, 1.0);
    std::vector<AntTour> tours;
    for (std::uint32_t k = 0; k < 4; ++k) {
      auto stream = ant_stream(static_cast<std::uint64_t>(i), 0, k);
      tours.push_back(construct_tour(g, table, defaults, query, known, stream, k));
      if (!tour_is_valid(tours.back(), g, known)) ++bad["tour-validity"];
    }
    const auto before = table.values();
    update_trail(table, tours, defaults);
    for (const auto& [key, tau] : table.values()) {
      if (tau < before.at(key)) {
        ++bad["pheromone-monotonicity"];
        break;
      }
    }

    const auto text = g.snapshot_text();
    const auto restored = FPGraph::from_text(text);
    if (!(restored == g) || restored.snapshot_text() != text) ++bad["snapshot-round-trip"];

    auto txns = random_transactions(rng, 8, 6, 4);
    FPGraph ordered(2);
    for (const auto& t : txns) ordered.insert_branch(t);
    std::shuffle(txns.begin(), txns.end(), rng);
    FPGraph shuffled(2);
    for (const auto& t : txns) shuffled.insert_branch(t);
    if (!(ordered == shuffled)) ++bad["data-list-order"];
  }

  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = bad.empty() && elapsed < 10.0;
  o.detail = "7 properties x " + std::to_string(kCases) + " cases, " + fmt_s(elapsed);
  for (const auto& [name, n] : bad) o.detail += ", " + name + " failed " + std::to_string(n);
  return o;
}

Outcome criterion_6() {
  // t1 is defined through t3 and t4; t2 exists but never leads into t3.
  FPGraph g(3);
  g.insert_branch(def_txn("t1", {"t3", "t4"}));
  g.insert_branch(def_txn("t2", {}));
  const auto report = g.apply_qa_transaction(qa_txn("t1", {"t2", "t3", "t4"}));

  const bool ok = report.status == MatchStatus::kSuffix && g.find_edge("t2", "t3") == nullptr &&
                  g.find_edge("t3", "t4")->frequency == 2 && g.find_edge("t4", "t1")->frequency == 2 &&
                  g.find_edge(kRoot, "t3")->frequency == 1 && g.find_edge(kRoot, "t2")->frequency == 1 &&
                  report.credited_edges == 2;
  Outcome o;
  o.pass = ok;
  o.detail = ok ? "credited t3->t4 and t4->t1 once each" : "unexpected crediting";
  return o;
}

Outcome criterion_7() {
  Outcome o;
  FPGraph g(3);
  g.insert_branch(def_txn("x", {"y"}));
  g.insert_branch(def_txn("z", {"w", "y"}));
  // w->y sits at sigma - 2 = 1; one batch brings it to sigma - 1.
  g.apply_qa_transaction(qa_txn("y", {"w"}));
  g.promote_associations();
  bool ok = g.find_edge("w", "y")->frequency == 2 && !g.find_edge("w", "y")->is_association;

  // A batch with only an unmatched record leaves it untouched.
  g.apply_qa_transaction(qa_txn("y", {"q"}));
  g.promote_associations();
  ok = ok && !g.find_edge("w", "y")->is_association;

  // The crossing batch.
  g.apply_qa_transaction(qa_txn("y", {"w"}));
  const auto promoted = g.promote_associations();
  const bool crossed = g.find_edge("w", "y")->frequency == 3 && g.find_edge("w", "y")->is_association &&
                       std::find(promoted.begin(), promoted.end(), EdgeKey{"w", "y"}) != promoted.end();

  FPGraph s(3);
  s.insert_branch(def_txn("cell nucleus", {"cell"}));
  s.promote_associations();
  const EdgeStats* subset = s.find_edge("cell", "cell nucleus");
  const bool subset_ok = subset != nullptr && subset->frequency == 1 && subset->is_association;

  o.pass = ok && crossed && subset_ok;
  o.detail = std::string(ok && crossed ? "flip at crossing batch" : "flip timing wrong") + ", " +
             (subset_ok ? "subset rule promotes cell->cell nucleus" : "subset rule failed");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 two-branch construction", criterion_1},
      {"2 case-study data lists", criterion_2},
      {"3 case-study recommendations", criterion_3},
      {"4 oracle equivalence", criterion_4},
      {"5 property suites", criterion_5},
      {"6 sub-transaction fallback", criterion_6},
      {"7 association promotion", criterion_7},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

#include "learnpath/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "learnpath/aco.hpp"
#include "learnpath/corpus.hpp"
#include "learnpath/errors.hpp"
#include "learnpath/fp_graph.hpp"
#include "learnpath/oracle.hpp"
#include "learnpath/service.hpp"

namespace learnpath {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot write '" + path + "'");
  out << content;
  if (!out.flush()) throw Error(Errc::kIo, "cannot write '" + path + "'");
}

FPGraph load_graph(const std::string& path) {
  const auto text = read_file(path);
  try {
    return FPGraph::from_text(text);
  } catch (const Error& e) {
    throw Error(Errc::kParse, path + ": " + e.what());
  }
}

KnownSet normalize_known(const std::vector<std::string>& raw) {
  KnownSet known;
  for (const auto& k : raw) known.insert(normalize_term(k));
  return known;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i] == kRootTerm ? "Root" : items[i];
  }
  return out;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::kNotFound:
      return kExitUnknownTerm;
    case Errc::kNoPath:
      return kExitNoPath;
    case Errc::kOracleTooLarge:
      return kExitOracleGuard;
    default:
      return kExitIo;
  }
}

struct QueryOptions {
  std::string graph;
  std::string term;
  std::vector<std::string> known;
  std::optional<double> alpha, beta, rho, q;
  std::optional<std::uint32_t> ants, iters, stagnation;
  std::optional<std::uint64_t> seed;
  bool greedy = false;
  bool json = false;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequent-pattern learning path search"};
  app.require_subcommand(1);

  std::string definitions, qa_path, out_path;
  std::uint64_t sigma = 3;
  auto* build = app.add_subcommand("build", "Build a graph snapshot from a definitions corpus");
  build->add_option("--definitions", definitions, "Definitions JSON file")->required();
  build->add_option("--qa", qa_path, "QA log (JSON Lines)");
  build->add_option("--sigma", sigma, "Association threshold")->required()->check(CLI::PositiveNumber);
  build->add_option("--out", out_path, "Snapshot output path")->required();

  QueryOptions q;
  auto* query = app.add_subcommand("query", "Recommend a learning path with the ant colony search");
  query->add_option("--graph", q.graph, "Graph snapshot")->required();
  query->add_option("--term", q.term, "Query term")->required();
  query->add_option("--known", q.known, "Comma-separated known terms")->delimiter(',');
  query->add_option("--alpha", q.alpha, "Pheromone exponent");
  query->add_option("--beta", q.beta, "Attractiveness exponent");
  query->add_option("--rho", q.rho, "Trail persistence in (0, 1]");
  query->add_option("--q", q.q, "Deposit constant Q");
  query->add_option("--ants", q.ants, "Ants per iteration");
  query->add_option("--iters", q.iters, "Maximum iterations");
  query->add_option("--stagnation", q.stagnation, "Stop after this many iterations without improvement");
  query->add_option("--seed", q.seed, "Random seed (drawn and printed when omitted)");
  query->add_flag("--greedy-fallback", q.greedy, "Take the max-frequency edge when no association is feasible");
  query->add_flag("--json", q.json, "Print the path as JSON");

  std::string oracle_graph, oracle_term;
  std::vector<std::string> oracle_known;
  auto* oracle = app.add_subcommand("oracle", "Exhaustively search for the optimal path");
  oracle->add_option("--graph", oracle_graph, "Graph snapshot")->required();
  oracle->add_option("--term", oracle_term, "Query term")->required();
  oracle->add_option("--known", oracle_known, "Comma-separated known terms")->delimiter(',');

  std::string serve_graph, serve_config;
  std::optional<int> serve_port;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
  serve_cmd->add_option("--graph", serve_graph, "Graph snapshot to load at startup");
  serve_cmd->add_option("--port", serve_port, "Port to listen on");
  serve_cmd->add_option("--config", serve_config, "Service config file (JSON)");

  std::string dot_graph, dot_out;
  auto* dot = app.add_subcommand("export-dot", "Write the graph in DOT format");
  dot->add_option("--graph", dot_graph, "Graph snapshot")->required();
  dot->add_option("--out", dot_out, "DOT output path")->required();

  std::string stats_graph;
  auto* stats = app.add_subcommand("stats", "Summarize a graph snapshot");
  stats->add_option("--graph", stats_graph, "Graph snapshot")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    if (*build) {
      const auto defs = parse_definitions(read_file(definitions));
      FPGraph graph(sigma);
      for (const auto& d : defs) graph.insert_branch(to_transaction(d));
      std::size_t matched = 0, qa_total = 0;
      if (!qa_path.empty()) {
        for (const auto& txn : parse_qa_log(read_file(qa_path))) {
          ++qa_total;
          const auto m = graph.apply_qa_transaction(txn);
          if (m.status == MatchStatus::kFull || m.status == MatchStatus::kSuffix) ++matched;
        }
      }
      graph.promote_associations();
      write_file(out_path, graph.snapshot_text());
      out << "nodes: " << graph.nodes().size() << "\n"
          << "edges: " << graph.edges().size() << "\n"
          << "associations: " << graph.association_count() << "\n";
      if (!qa_path.empty()) out << "qa matched: " << matched << "/" << qa_total << "\n";
      return kExitOk;
    }

    if (*query) {
      const FPGraph graph = load_graph(q.graph);
      ACOParams params;
      if (q.alpha) params.alpha = *q.alpha;
      if (q.beta) params.beta = *q.beta;
      if (q.rho) params.rho = *q.rho;
      if (q.q) params.q_factor = *q.q;
      if (q.ants) params.n_ants = *q.ants;
      if (q.iters) params.max_iterations = *q.iters;
      if (q.stagnation) params.stagnation_window = *q.stagnation;
      params.greedy_fallback = q.greedy;
      if (q.seed) {
        params.seed = *q.seed;
      } else {
        std::random_device rd;
        params.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
        if (!q.json) out << "seed: " << params.seed << "\n";
      }
      const std::string term = normalize_term(q.term);
      try {
        const auto lp = learning_path(graph, term, normalize_known(q.known), params);
        if (q.json) {
          auto doc = to_json(lp);
          doc["seed"] = params.seed;
          out << doc.dump(2) << "\n";
        } else {
          out << "path: " << join(lp.path, " -> ") << "\n"
              << "recommended: " << join({lp.recommended.begin(), lp.recommended.end()}, ", ") << "\n"
              << "associations: " << lp.association_count << "\n"
              << "iterations: " << lp.iterations_run << "\n";
        }
      } catch (const Error& e) {
        if (e.code() == Errc::kNotFound) {
          err << "error: unknown term '" << term << "'\n";
          std::vector<std::string> close;
          for (const auto& [name, node] : graph.nodes()) {
            if (name != kRootTerm && !term.empty() && name.front() == term.front()) close.push_back(name);
          }
          if (!close.empty()) err << "did you mean: " << join(close, ", ") << "\n";
          return kExitUnknownTerm;
        }
        throw;
      }
      return kExitOk;
    }

    if (*oracle) {
      const FPGraph graph = load_graph(oracle_graph);
      const auto result = brute_force_oracle(graph, normalize_term(oracle_term), normalize_known(oracle_known));
      auto doc = to_json(result.best);
      doc["paths_enumerated"] = result.paths_found;
      doc["optimal_paths"] = result.optimal_paths;
      out << doc.dump(2) << "\n";
      return kExitOk;
    }

    if (*serve_cmd) {
      ServiceConfig config = load_service_config(serve_config);
      if (!serve_graph.empty()) config.graph_path = serve_graph;
      if (serve_port) config.port = *serve_port;
      Service service(config);
      if (!config.graph_path.empty()) {
        const auto loaded = service.load_graph_text(read_file(config.graph_path));
        if (loaded.status != 200) {
          err << "error: " << config.graph_path << ": " << loaded.body.value("detail", "") << "\n";
          return kExitIo;
        }
      }
      out << "listening on " << config.host << ":" << config.port << std::endl;
      if (!serve(service, config.host, config.port)) {
        err << "error: cannot bind " << config.host << ":" << config.port << "\n";
        return kExitPort;
      }
      return kExitOk;
    }

    if (*dot) {
      write_file(dot_out, load_graph(dot_graph).to_dot());
      return kExitOk;
    }

    if (*stats) {
      const FPGraph graph = load_graph(stats_graph);
      std::map<std::uint64_t, std::size_t> histogram;
      for (const auto& [key, e] : graph.edges()) ++histogram[e.frequency];
      out << "sigma: " << graph.sigma() << "\n"
          << "nodes: " << graph.nodes().size() << "\n"
          << "edges: " << graph.edges().size() << "\n"
          << "associations: " << graph.association_count() << "\n"
          << "unmatched: " << graph.unmatched_log().size() << "\n"
          << "frequency histogram:\n";
      for (const auto& [freq, count] : histogram) out << "  " << freq << ": " << count << "\n";
      return kExitOk;
    }
  } catch (const NoPathError& e) {
    err << "error: " << e.what() << "\n";
    if (!e.frontier().empty()) err << "dead ends: " << join(e.frontier(), ", ") << "\n";
    return kExitNoPath;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}

}  // namespace learnpath

// Thin bindings over the core library. Structured values cross the boundary
// as JSON text; the Python package turns them into dicts.
#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "learnpath/aco.hpp"
#include "learnpath/corpus.hpp"
#include "learnpath/errors.hpp"
#include "learnpath/fp_graph.hpp"
#include "learnpath/oracle.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace learnpath;

namespace {

KnownSet to_known(const std::vector<std::string>& terms) {
  KnownSet known;
  for (const auto& t : terms) known.insert(normalize_term(t));
  return known;
}

ACOParams params_from(const std::string& overrides) {
  return merge_params(ACOParams{}, overrides.empty() ? json::object() : json::parse(overrides));
}

FPGraph build_graph(const std::string& definitions, const std::string& qa_log, std::uint64_t sigma) {
  FPGraph g(sigma);
  for (const auto& t : to_transactions(parse_definitions(definitions))) g.insert_branch(t);
  for (const auto& t : parse_qa_log(qa_log)) g.apply_qa_transaction(t);
  g.promote_associations();
  return g;
}

}  // namespace

PYBIND11_MODULE(_learnpath, m) {
  m.doc() = "Learning-path search over frequent-pattern prerequisite graphs";

  // Exception types live as long as the interpreter; keep plain handles.
  static py::handle base_error = py::exception<Error>(m, "LearnpathError", PyExc_ValueError).release();
  static py::handle no_path_error = py::exception<NoPathError>(m, "NoPathError", base_error.ptr()).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NoPathError& e) {
      py::object exc = no_path_error(e.what());
      exc.attr("code") = std::string(errc_name(e.code()));
      exc.attr("frontier") = e.frontier();
      PyErr_SetObject(no_path_error.ptr(), exc.ptr());
    } catch (const Error& e) {
      py::object exc = base_error(e.what());
      exc.attr("code") = std::string(errc_name(e.code()));
      PyErr_SetObject(base_error.ptr(), exc.ptr());
    }
  });

  m.attr("ROOT") = std::string(kRootTerm);

  m.def("normalize_term", &normalize_term, py::arg("raw"));
  m.def(
      "parse_definitions_json",
      [](const std::string& text) {
        json out = json::array();
        for (const auto& d : parse_definitions(text)) out.push_back({{"term", d.term}, {"keywords", d.keywords}});
        return out.dump();
      },
      py::arg("text"));

  py::class_<FPGraph>(m, "Graph")
      .def(py::init<std::uint64_t>(), py::arg("sigma"))
      .def_static(
          "build", &build_graph, py::arg("definitions"), py::arg("qa_log") = "", py::arg("sigma") = 3,
          "Build from definitions JSON text and an optional QA JSONL log, then promote associations.")
      .def_static("from_snapshot_json", &FPGraph::from_text, py::arg("text"))
      .def("snapshot_json", &FPGraph::snapshot_text)
      .def("to_dot", &FPGraph::to_dot)
      .def(
          "insert_definition",
          [](FPGraph& g, const std::string& term, const std::vector<std::string>& keywords) {
            json entry = {{"term", term}, {"keywords", keywords}};
            g.insert_branch(to_transaction(parse_definitions(json::array({entry}).dump()).front()));
          },
          py::arg("term"), py::arg("keywords"))
      .def(
          "apply_qa_log",
          [](FPGraph& g, const std::string& jsonl) {
            json out = json::array();
            for (const auto& t : parse_qa_log(jsonl)) {
              const auto r = g.apply_qa_transaction(t);
              out.push_back({{"question", t.target},
                             {"status", match_status_name(r.status)},
                             {"credited_edges", r.credited_edges}});
            }
            return out.dump();
          },
          py::arg("jsonl"))
      .def("promote_associations",
           [](FPGraph& g) {
             std::vector<std::pair<std::string, std::string>> out;
             for (const auto& k : g.promote_associations()) out.emplace_back(k.from, k.to);
             return out;
           })
      .def_property_readonly("sigma", &FPGraph::sigma)
      .def_property_readonly("association_count", &FPGraph::association_count)
      .def("__len__", [](const FPGraph& g) { return g.nodes().size(); })
      .def("__contains__", [](const FPGraph& g, const std::string& t) { return g.contains(t); })
      .def("terms",
           [](const FPGraph& g) {
             std::vector<std::string> out;
             for (const auto& [t, n] : g.nodes()) out.push_back(t);
             return out;
           })
      .def("data_list", [](const FPGraph& g, const std::string& t) { return g.node(normalize_term(t)).data_list; },
           py::arg("term"))
      .def(
          "edge",
          [](const FPGraph& g, const std::string& from, const std::string& to) -> py::object {
            const EdgeStats* e = g.find_edge(from, to);
            if (e == nullptr) return py::none();
            return py::make_tuple(e->frequency, e->is_association);
          },
          py::arg("source"), py::arg("target"), "(frequency, is_association) or None")
      .def(py::self == py::self);

  m.def(
      "learning_path_json",
      [](const FPGraph& g, const std::string& term, const std::vector<std::string>& known,
         const std::string& params) {
        return to_json(learning_path(g, normalize_term(term), to_known(known), params_from(params))).dump();
      },
      py::arg("graph"), py::arg("term"), py::arg("known") = std::vector<std::string>{}, py::arg("params") = "");

  m.def(
      "oracle_json",
      [](const FPGraph& g, const std::string& term, const std::vector<std::string>& known) {
        const auto r = brute_force_oracle(g, normalize_term(term), to_known(known));
        json doc = to_json(r.best);
        doc["paths_enumerated"] = r.paths_found;
        doc["optimal_paths"] = r.optimal_paths;
        return doc.dump();
      },
      py::arg("graph"), py::arg("term"), py::arg("known") = std::vector<std::string>{});
}

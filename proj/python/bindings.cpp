#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aa/json_io.hpp"
#include "aa/miner.hpp"
#include "aa/parser.hpp"
#include "aa/rdf.hpp"
#include "aa/session.hpp"
#include "aa/stats.hpp"
#include "aa/store.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

std::string parse_message(const std::string& text) {
  const auto r = aa::parser::parse(text);
  json j{{"kind", aa::to_string(r.kind)}, {"clean_text", r.clean_text}, {"tags", r.tags}, {"ubiquitous", r.ubiquitous}};
  const auto deviation = aa::parser::flag_deviation(r);
  j["deviation"] = deviation ? json(aa::to_string(*deviation)) : json(nullptr);
  return j.dump();
}

py::tuple assign_slot(std::int64_t anchor, std::int64_t t, std::int64_t slot, std::int64_t tolerance) {
  const auto a = aa::session::assign_slot({aa::from_unix(anchor), aa::Seconds{slot}, aa::Seconds{tolerance}},
                                          aa::from_unix(t));
  return py::make_tuple(a.index, a.offset.count(), a.within_tolerance);
}

py::tuple dedup(const std::vector<std::string>& candidates, const std::set<std::string>& corpus) {
  std::vector<aa::Shout> shouts;
  for (const auto& c : candidates) shouts.push_back(aa::Shout{.message = c});
  const auto r = aa::miner::dedup(shouts, corpus);
  std::vector<std::string> kept;
  for (const auto& s : r.kept) kept.push_back(s.message);
  return py::make_tuple(kept, r.report.duplicates_discarded);
}

class PyStore {
 public:
  explicit PyStore(std::optional<std::string> journal) {
    std::unique_ptr<aa::server::JournalBackend> backend;
    if (journal) {
      backend = std::make_unique<aa::server::FileJournal>(*journal);
    } else {
      backend = std::make_unique<aa::server::MemoryJournal>();
    }
    store_ = std::make_unique<aa::server::Store>(std::move(backend));
  }

  std::string shout(const std::string& nick, const std::string& msg) { return store_->receive_shout(nick, msg).id; }
  std::string message(const std::string& nick, const std::string& msg) {
    return aa::server::to_json(store_->receive_message(nick, msg)).dump();
  }
  std::string shouts(const std::string& format) const {
    return store_->render_listing(format == "text" ? aa::server::ListingFormat::Text : aa::server::ListingFormat::Json);
  }
  std::string report(std::optional<std::size_t> n) const { return store_->report(n).dump(); }
  std::string review(const std::string& session, const std::string& reviewer, double score) {
    return json(store_->record_review(session, reviewer, score, std::nullopt)).dump();
  }
  std::string ntriples() const {
    auto graph = aa::rdf::export_ontology();
    auto data = aa::rdf::export_data(store_->snapshot());
    graph.insert(graph.end(), data.begin(), data.end());
    return aa::rdf::to_ntriples(graph);
  }
  std::string violations() const {
    return aa::rdf::to_json(aa::rdf::validate_graph(aa::rdf::export_data(store_->snapshot()))).dump();
  }
  std::string summary() const { return aa::stats::to_json(aa::stats::summarize(store_->snapshot())).dump(); }

 private:
  std::unique_ptr<aa::server::Store> store_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Algorithmic Autoregulation core: parsing, sessions, store, mining, RDF and statistics";

  py::register_exception<aa::Error>(m, "AAError", PyExc_ValueError);

  m.def("normalize_nick", &aa::normalize_nick);
  m.def("parse_message", &parse_message, "Kind, clean text, tags and deviation as a JSON string");
  m.def("assign_slot", &assign_slot, py::arg("anchor"), py::arg("t"), py::arg("slot") = 900,
        py::arg("tolerance") = 300, "(index, offset seconds, within tolerance) for unix timestamps");
  m.def("dedup", &dedup, py::arg("candidates"), py::arg("corpus"));
  m.def("tokenize", [](const std::string& text, const std::set<std::string>& stopwords) {
    return aa::stats::tokenize(text, stopwords);
  }, py::arg("text"), py::arg("stopwords") = std::set<std::string>{});
  m.def("suffix_stem", &aa::stats::suffix_stem);

  py::class_<PyStore>(m, "Store")
      .def(py::init<std::optional<std::string>>(), py::arg("journal") = std::nullopt)
      .def("shout", &PyStore::shout)
      .def("message", &PyStore::message)
      .def("shouts", &PyStore::shouts, py::arg("format") = "json")
      .def("report", &PyStore::report, py::arg("n") = std::nullopt)
      .def("review", &PyStore::review)
      .def("ntriples", &PyStore::ntriples)
      .def("violations", &PyStore::violations)
      .def("summary", &PyStore::summary);
}

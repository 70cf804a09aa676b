// aa-export: RDF view of a journal.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "aa/rdf.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Export AA data as RDF"};
  std::string journal, format = "ntriples";
  std::string base{aa::rdf::kDefaultDataBase};
  std::string vocab{aa::rdf::kDefaultNamespace};
  std::optional<std::string> output;
  bool validate = false, data_only = false;
  app.add_option("--journal", journal, "Journal file")->required();
  app.add_option("--format", format, "ntriples | turtle")->check(CLI::IsMember({"ntriples", "turtle"}));
  app.add_option("--base", base, "Base IRI for data nodes");
  app.add_option("--vocab", vocab, "Vocabulary namespace IRI");
  app.add_option("-o,--output", output, "Output file (default: standard output)");
  app.add_flag("--validate", validate, "Check functional and existential constraints; report on stderr");
  app.add_flag("--data-only", data_only, "Omit the ontology axioms");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!std::filesystem::exists(journal)) {
      throw aa::Error(aa::ErrorCode::UnreadableSource, "no journal at " + journal);
    }
    const auto snapshot = aa::server::snapshot_of_journal(journal);
    auto data = aa::rdf::export_data(snapshot, {vocab, base});
    aa::rdf::Graph graph = data_only ? aa::rdf::Graph{} : aa::rdf::export_ontology(vocab);
    graph.insert(graph.end(), data.begin(), data.end());

    const auto document = format == "turtle" ? aa::rdf::to_turtle(graph, vocab, base) : aa::rdf::to_ntriples(graph);
    if (output) {
      std::ofstream out(*output, std::ios::binary);
      out << document;
      if (!out) throw aa::Error(aa::ErrorCode::UnreadableSource, "cannot write " + *output);
    } else {
      std::cout << document;
    }
    if (validate) {
      const auto violations = aa::rdf::validate_graph(graph, vocab);
      std::cerr << aa::rdf::to_json(violations).dump(2) << "\n";
      if (!violations.empty()) return 4;
    }
  } catch (const aa::Error& e) {
    std::cerr << "aa-export: " << aa::to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#pragma once

// RDF view of AA data: the vocabulary (classes, properties, functional and
// existential constraints, upper-ontology mappings), instance export from a
// store snapshot, constraint validation, and N-Triples/Turtle output.

#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "aa/store.hpp"

namespace aa::rdf {

inline constexpr std::string_view kDefaultNamespace = "https://w3id.org/ontologiaa#";
inline constexpr std::string_view kDefaultDataBase = "https://w3id.org/ontologiaa/data/";

namespace ns {
inline constexpr std::string_view rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view rdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view owl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view foaf = "http://xmlns.com/foaf/0.1/";
inline constexpr std::string_view sioc = "http://rdfs.org/sioc/ns#";
inline constexpr std::string_view schema = "http://schema.org/";
inline constexpr std::string_view dcterms = "http://purl.org/dc/terms/";
inline constexpr std::string_view gndo = "https://d-nb.info/standards/elementset/gnd#";
}  // namespace ns

struct Term {
  enum class Kind { Iri, Literal, Blank };

  Kind kind = Kind::Iri;
  std::string value;     // IRI, lexical form, or blank label
  std::string datatype;  // literals only; empty means xsd:string

  static Term iri(std::string v) { return {Kind::Iri, std::move(v), {}}; }
  static Term blank(std::string label) { return {Kind::Blank, std::move(label), {}}; }
  static Term literal(std::string lexical, std::string datatype = {}) {
    return {Kind::Literal, std::move(lexical), std::move(datatype)};
  }

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  friend auto operator<=>(const Triple&, const Triple&) = default;
  friend bool operator==(const Triple&, const Triple&) = default;
};

using Graph = std::vector<Triple>;

// Local names within the AA namespace.
struct Vocabulary {
  std::vector<std::string> classes;
  std::vector<std::string> object_properties;
  std::vector<std::string> data_properties;
  std::set<std::string> functional;
  // class -> properties every instance must carry
  std::vector<std::pair<std::string, std::vector<std::string>>> existential;
  std::set<std::string> extensions;  // terms beyond the core picture
};

const Vocabulary& vocabulary();

Graph export_ontology(std::string_view vocab_ns = kDefaultNamespace);

struct ExportOptions {
  std::string vocab_ns{kDefaultNamespace};
  std::string base{kDefaultDataBase};
};

// Instance triples only; combine with export_ontology for a full document.
Graph export_data(const server::StoreSnapshot& snapshot, const ExportOptions& options = {});

struct Violation {
  std::string subject;
  std::string property;
  std::string rule;  // "functional" or "existential"
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> validate_graph(const Graph& graph, std::string_view vocab_ns = kDefaultNamespace);
nlohmann::json to_json(const std::vector<Violation>& violations);

// Sorted, deduplicated, one triple per line.
std::string to_ntriples(Graph graph);
std::string to_turtle(Graph graph, std::string_view vocab_ns = kDefaultNamespace,
                      std::string_view base = kDefaultDataBase);

std::string format_term(const Term& term);

// Percent-encodes everything outside the RFC 3986 unreserved set.
std::string encode_segment(std::string_view raw);

}  // namespace aa::rdf

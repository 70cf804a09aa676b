#include "aa/rdf.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

namespace aa::rdf {

using nlohmann::json;

namespace {

const std::string kType = std::string(ns::rdf) + "type";

std::string cat(std::string_view a, std::string_view b) {
  std::string out(a);
  out += b;
  return out;
}

Term xsd_datetime(Timestamp t) { return Term::literal(format_iso8601(t), cat(ns::xsd, "dateTime")); }

std::string decimal(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  std::string out(buf, ec == std::errc{} ? end : buf);
  if (out.find('.') == std::string::npos) out += ".0";
  return out;
}

void hex_escape(std::string& out, unsigned char c) {
  static constexpr char digits[] = "0123456789ABCDEF";
  out += "\\u00";
  out += digits[c >> 4];
  out += digits[c & 0xF];
}

std::string escape_literal(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20 || c == 0x7F) {
          hex_escape(out, c);
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

std::string escape_iri(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
        c == '`' || c == '\\') {
      hex_escape(out, c);
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

class Builder {
 public:
  explicit Builder(std::string vocab) : vocab_(std::move(vocab)) {}

  Term aa(std::string_view local) const { return Term::iri(cat(vocab_, local)); }

  void add(Term s, Term p, Term o) { graph.push_back({std::move(s), std::move(p), std::move(o)}); }
  void add(const Term& s, std::string_view pred_iri, Term o) { add(s, Term::iri(std::string(pred_iri)), std::move(o)); }

  Graph graph;

 private:
  std::string vocab_;
};

struct Mapping {
  std::string_view term;
  std::string_view relation;  // rdfs:subClassOf / rdfs:subPropertyOf
  std::string_view upper_ns;
  std::string_view upper_local;
};

}  // namespace

const Vocabulary& vocabulary() {
  static const Vocabulary v = [] {
    Vocabulary v;
    v.classes = {"User", "Shout", "Session", "ValidationReview"};
    v.object_properties = {"user", "session", "reviewer", "owner", "reviewedSession"};
    v.data_properties = {"nick",         "email",        "shoutMessage", "created", "score",
                         "clientCreated", "messageKind", "tag",          "sessionStart",
                         "sessionEnd",    "screencast",  "comment",      "reviewCreated"};
    for (const auto& p : v.object_properties) v.functional.insert(p);
    for (const auto& p : v.data_properties) {
      if (p != "nick" && p != "email" && p != "tag") v.functional.insert(p);
    }
    v.existential = {{"Shout", {"user", "shoutMessage", "created"}}, {"User", {"nick"}}};
    v.extensions = {"Session",     "ValidationReview", "session",      "reviewer",   "owner",
                    "reviewedSession", "score",        "clientCreated", "messageKind", "tag",
                    "sessionStart", "sessionEnd",      "screencast",   "comment",    "reviewCreated"};
    return v;
  }();
  return v;
}

Graph export_ontology(std::string_view vocab_ns) {
  const auto& v = vocabulary();
  Builder b{std::string(vocab_ns)};
  const auto rdfs = [](std::string_view l) { return cat(ns::rdfs, l); };
  const auto owl = [](std::string_view l) { return cat(ns::owl, l); };

  std::string ontology_iri(vocab_ns);
  while (!ontology_iri.empty() && (ontology_iri.back() == '#' || ontology_iri.back() == '/')) ontology_iri.pop_back();
  const auto onto = Term::iri(ontology_iri);
  b.add(onto, kType, Term::iri(owl("Ontology")));
  b.add(onto, rdfs("label"), Term::literal("OntologiAA"));
  b.add(onto, rdfs("comment"), Term::literal("Vocabulary for Algorithmic Autoregulation users, shouts, sessions and reviews."));
  // Linked at annotation level only; the participation vocabularies publish no term IRIs to map onto.
  b.add(onto, rdfs("seeAlso"), Term::iri(std::string(ns::gndo)));
  b.add(onto, rdfs("comment"), Term::literal("Related vocabularies: GND ontology (GNDO), participation ontologies (OPS)."));

  const auto extension_note = Term::literal("Extension term beyond the core User/Shout vocabulary.");
  for (const auto& c : v.classes) {
    b.add(b.aa(c), kType, Term::iri(owl("Class")));
    b.add(b.aa(c), rdfs("label"), Term::literal(c));
    if (v.extensions.count(c)) b.add(b.aa(c), rdfs("comment"), extension_note);
  }

  const std::map<std::string, std::pair<std::string, std::string>> signature{
      {"user", {"Shout", "User"}},
      {"session", {"Shout", "Session"}},
      {"reviewer", {"ValidationReview", "User"}},
      {"owner", {"Session", "User"}},
      {"reviewedSession", {"ValidationReview", "Session"}},
      {"nick", {"User", "string"}},
      {"email", {"User", "string"}},
      {"shoutMessage", {"Shout", "string"}},
      {"created", {"Shout", "dateTime"}},
      {"clientCreated", {"Shout", "dateTime"}},
      {"messageKind", {"Shout", "string"}},
      {"tag", {"Shout", "string"}},
      {"score", {"ValidationReview", "decimal"}},
      {"comment", {"ValidationReview", "string"}},
      {"reviewCreated", {"ValidationReview", "dateTime"}},
      {"sessionStart", {"Session", "dateTime"}},
      {"sessionEnd", {"Session", "dateTime"}},
      {"screencast", {"Session", "string"}},
  };
  auto declare = [&](const std::string& p, bool object) {
    const auto term = b.aa(p);
    b.add(term, kType, Term::iri(owl(object ? "ObjectProperty" : "DatatypeProperty")));
    b.add(term, rdfs("label"), Term::literal(p));
    if (v.functional.count(p)) b.add(term, kType, Term::iri(owl("FunctionalProperty")));
    if (v.extensions.count(p)) b.add(term, rdfs("comment"), extension_note);
    const auto& [domain, range] = signature.at(p);
    b.add(term, rdfs("domain"), b.aa(domain));
    b.add(term, rdfs("range"), object ? b.aa(range) : Term::iri(cat(ns::xsd, range)));
  };
  for (const auto& p : v.object_properties) declare(p, true);
  for (const auto& p : v.data_properties) declare(p, false);

  for (const auto& [cls, props] : v.existential) {
    for (const auto& p : props) {
      const auto node = Term::blank("restriction-" + cls + "-" + p);
      b.add(b.aa(cls), rdfs("subClassOf"), node);
      b.add(node, kType, Term::iri(owl("Restriction")));
      b.add(node, owl("onProperty"), b.aa(p));
      const bool object = std::find(v.object_properties.begin(), v.object_properties.end(), p) !=
                          v.object_properties.end();
      b.add(node, owl("someValuesFrom"),
            object ? b.aa(signature.at(p).second) : Term::iri(cat(ns::xsd, signature.at(p).second)));
    }
  }

  static constexpr Mapping mappings[] = {
      {"User", "subClassOf", ns::foaf, "Agent"},
      {"User", "subClassOf", ns::sioc, "UserAccount"},
      {"User", "subClassOf", ns::schema, "Person"},
      {"Shout", "subClassOf", ns::sioc, "Post"},
      {"Shout", "subClassOf", ns::schema, "SocialMediaPosting"},
      {"Session", "subClassOf", ns::schema, "Event"},
      {"ValidationReview", "subClassOf", ns::schema, "Review"},
      {"nick", "subPropertyOf", ns::foaf, "nick"},
      {"email", "subPropertyOf", ns::schema, "email"},
      {"shoutMessage", "subPropertyOf", ns::sioc, "content"},
      {"shoutMessage", "subPropertyOf", ns::schema, "text"},
      {"created", "subPropertyOf", ns::dcterms, "created"},
      {"user", "subPropertyOf", ns::sioc, "has_creator"},
      {"user", "subPropertyOf", ns::dcterms, "creator"},
      {"reviewer", "subPropertyOf", ns::schema, "author"},
      {"score", "subPropertyOf", ns::schema, "ratingValue"},
      {"reviewedSession", "subPropertyOf", ns::schema, "itemReviewed"},
      {"sessionStart", "subPropertyOf", ns::schema, "startDate"},
      {"sessionEnd", "subPropertyOf", ns::schema, "endDate"},
  };
  for (const auto& m : mappings) {
    b.add(b.aa(m.term), rdfs(m.relation), Term::iri(cat(m.upper_ns, m.upper_local)));
  }
  return b.graph;
}

std::string encode_segment(std::string_view raw) {
  static constexpr char digits[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : raw) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += digits[c >> 4];
      out += digits[c & 0xF];
    }
  }
  return out;
}

Graph export_data(const server::StoreSnapshot& snapshot, const ExportOptions& options) {
  Builder b{options.vocab_ns};
  const auto& base = options.base;
  auto user_iri = [&](const std::string& id) { return Term::iri(base + "user/" + encode_segment(id)); };
  auto session_iri = [&](const std::string& id) { return Term::iri(base + "session/" + encode_segment(id)); };
  const auto aa = [&](std::string_view l) { return cat(options.vocab_ns, l); };

  std::map<std::string, User> users;
  for (const auto& u : snapshot.users) users.emplace(u.id, u);
  for (const auto& s : snapshot.shouts) users.try_emplace(s.nick, User{s.nick, {s.nick}, {}});
  for (const auto& se : snapshot.sessions) {
    users.try_emplace(se.user, User{se.user, {se.user}, {}});
    if (se.review) users.try_emplace(se.review->reviewer, User{se.review->reviewer, {se.review->reviewer}, {}});
  }

  for (const auto& [id, u] : users) {
    const auto node = user_iri(id);
    b.add(node, kType, b.aa("User"));
    auto nicks = u.nicks;
    if (nicks.empty()) nicks.insert(id);
    for (const auto& n : nicks) b.add(node, aa("nick"), Term::literal(n));
    for (const auto& e : u.emails) b.add(node, aa("email"), Term::literal(e));
  }

  for (const auto& s : snapshot.shouts) {
    const auto node = Term::iri(base + "shout/" + encode_segment(s.id));
    b.add(node, kType, b.aa("Shout"));
    b.add(node, aa("user"), user_iri(s.nick));
    b.add(node, aa("shoutMessage"), Term::literal(s.message));
    b.add(node, aa("created"), xsd_datetime(s.created));
    if (s.client_created) b.add(node, aa("clientCreated"), xsd_datetime(*s.client_created));
    b.add(node, aa("messageKind"), Term::literal(to_string(s.kind)));
    if (s.session_ref) b.add(node, aa("session"), session_iri(*s.session_ref));
    for (const auto& t : s.tags) b.add(node, aa("tag"), Term::literal(display(t)));
  }

  for (const auto& se : snapshot.sessions) {
    const auto node = session_iri(se.id);
    b.add(node, kType, b.aa("Session"));
    b.add(node, aa("owner"), user_iri(se.user));
    b.add(node, aa("sessionStart"), xsd_datetime(se.start));
    b.add(node, aa("sessionEnd"), xsd_datetime(se.end));
    if (se.screencast) b.add(node, aa("screencast"), Term::literal(*se.screencast));
    if (se.review) {
      const auto& r = *se.review;
      const auto review = Term::iri(base + "review/" + encode_segment(se.id));
      b.add(review, kType, b.aa("ValidationReview"));
      b.add(review, aa("reviewedSession"), node);
      b.add(review, aa("reviewer"), user_iri(r.reviewer));
      b.add(review, aa("score"), Term::literal(decimal(r.score), cat(ns::xsd, "decimal")));
      b.add(review, aa("reviewCreated"), xsd_datetime(r.created));
      if (r.comment) b.add(review, aa("comment"), Term::literal(*r.comment));
    }
  }
  return b.graph;
}

std::vector<Violation> validate_graph(const Graph& graph, std::string_view vocab_ns) {
  const auto& v = vocabulary();
  std::map<std::pair<std::string, std::string>, std::set<Term>> values;
  std::map<std::string, std::set<std::string>> present;  // subject -> local property names
  std::map<std::string, std::set<std::string>> types;    // subject -> local class names
  for (const auto& t : graph) {
    const auto subject = format_term(t.subject);
    if (t.predicate.value == kType && t.object.kind == Term::Kind::Iri &&
        t.object.value.starts_with(vocab_ns)) {
      types[subject].insert(t.object.value.substr(vocab_ns.size()));
      continue;
    }
    if (!t.predicate.value.starts_with(vocab_ns)) continue;
    const auto local = t.predicate.value.substr(vocab_ns.size());
    present[subject].insert(local);
    if (v.functional.count(local)) values[{subject, local}].insert(t.object);
  }

  std::vector<Violation> out;
  for (const auto& [key, objects] : values) {
    if (objects.size() > 1) {
      out.push_back({key.first, cat(vocab_ns, key.second), "functional",
                     std::to_string(objects.size()) + " distinct values"});
    }
  }
  for (const auto& [subject, classes] : types) {
    for (const auto& [cls, props] : v.existential) {
      if (!classes.count(cls)) continue;
      const auto& has = present[subject];
      for (const auto& p : props) {
        if (!has.count(p)) out.push_back({subject, cat(vocab_ns, p), "existential", "aa:" + cls + " without aa:" + p});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.subject, a.property, a.rule) < std::tie(b.subject, b.property, b.rule);
  });
  return out;
}

json to_json(const std::vector<Violation>& violations) {
  json arr = json::array();
  for (const auto& v : violations) {
    arr.push_back({{"subject", v.subject}, {"property", v.property}, {"rule", v.rule}, {"detail", v.detail}});
  }
  return arr;
}

std::string format_term(const Term& term) {
  switch (term.kind) {
    case Term::Kind::Iri:
      return "<" + escape_iri(term.value) + ">";
    case Term::Kind::Blank:
      return "_:" + term.value;
    case Term::Kind::Literal: {
      auto out = "\"" + escape_literal(term.value) + "\"";
      if (!term.datatype.empty() && term.datatype != cat(ns::xsd, "string")) {
        out += "^^<" + escape_iri(term.datatype) + ">";
      }
      return out;
    }
  }
  return {};
}

std::string to_ntriples(Graph graph) {
  std::vector<std::string> lines;
  lines.reserve(graph.size());
  for (const auto& t : graph) {
    lines.push_back(format_term(t.subject) + " " + format_term(t.predicate) + " " + format_term(t.object) + " .");
  }
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

namespace {

bool plain_local(std::string_view s) {
  if (s.empty() || s.front() == '-' || s.front() == '.' || s.back() == '.') return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

}  // namespace

std::string to_turtle(Graph graph, std::string_view vocab_ns, std::string_view base) {
  const std::vector<std::pair<std::string, std::string>> prefixes{
      {"aa", std::string(vocab_ns)},   {"d", std::string(base)},         {"rdf", std::string(ns::rdf)},
      {"rdfs", std::string(ns::rdfs)}, {"owl", std::string(ns::owl)},     {"xsd", std::string(ns::xsd)},
      {"foaf", std::string(ns::foaf)}, {"sioc", std::string(ns::sioc)},   {"schema", std::string(ns::schema)},
      {"dcterms", std::string(ns::dcterms)},
  };
  auto iri = [&](const std::string& value) {
    // Longest namespace wins, so data IRIs under the vocabulary base are not split oddly.
    const std::pair<std::string, std::string>* best = nullptr;
    for (const auto& p : prefixes) {
      if (value.starts_with(p.second) && plain_local(std::string_view(value).substr(p.second.size())) &&
          (!best || p.second.size() > best->second.size())) {
        best = &p;
      }
    }
    if (best) return best->first + ":" + value.substr(best->second.size());
    return "<" + escape_iri(value) + ">";
  };
  auto term = [&](const Term& t) -> std::string {
    if (t.kind == Term::Kind::Iri) return iri(t.value);
    if (t.kind == Term::Kind::Blank) return "_:" + t.value;
    auto out = "\"" + escape_literal(t.value) + "\"";
    if (!t.datatype.empty() && t.datatype != cat(ns::xsd, "string")) out += "^^" + iri(t.datatype);
    return out;
  };

  std::sort(graph.begin(), graph.end(), [](const Triple& a, const Triple& b) {
    return std::tuple(format_term(a.subject), format_term(a.predicate), format_term(a.object)) <
           std::tuple(format_term(b.subject), format_term(b.predicate), format_term(b.object));
  });
  graph.erase(std::unique(graph.begin(), graph.end()), graph.end());

  std::ostringstream out;
  for (const auto& [p, iri_text] : prefixes) out << "@prefix " << p << ": <" << iri_text << "> .\n";
  std::size_t i = 0;
  while (i < graph.size()) {
    out << "\n" << term(graph[i].subject);
    std::size_t j = i;
    bool first_pred = true;
    while (j < graph.size() && graph[j].subject == graph[i].subject) {
      out << (first_pred ? "\n    " : " ;\n    ") << (graph[j].predicate.value == kType ? std::string("a") : term(graph[j].predicate)) << " " << term(graph[j].object);
      std::size_t k = j + 1;
      while (k < graph.size() && graph[k].subject == graph[i].subject && graph[k].predicate == graph[j].predicate) {
        out << ",\n        " << term(graph[k].object);
        ++k;
      }
      first_pred = false;
      j = k;
    }
    out << " .\n";
    i = j;
  }
  return out.str();
}

}  // namespace aa::rdf

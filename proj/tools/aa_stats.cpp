// aa-stats: counts, histograms, token tables and co-occurrence graphs.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "aa/stats.hpp"
#include "aa/text.hpp"

namespace {

std::set<std::string> read_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw aa::Error(aa::ErrorCode::UnreadableSource, "cannot read " + path);
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    for (auto w : aa::split_whitespace(line)) {
      if (w.front() == '#') break;
      out.insert(aa::to_lower(w));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistics over an AA journal"};
  std::string journal, report = "summary", stemmer = "suffix";
  std::optional<std::string> stopwords_file;
  bool as_json = false, as_tsv = false, include_tags = false, include_machine = false;
  app.add_option("--journal", journal, "Journal file")->required();
  app.add_option("--report", report, "summary | histogram:<scale> | tokens | graph");
  app.add_option("--stopwords", stopwords_file, "Stopword list, whitespace separated");
  app.add_option("--stemmer", stemmer, "suffix | identity")->check(CLI::IsMember({"suffix", "identity"}));
  app.add_flag("--include-tags", include_tags, "Count tags as words");
  app.add_flag("--include-machine", include_machine, "Count machine-generated records");
  auto* json_flag = app.add_flag("--json", as_json, "JSON output (default)");
  app.add_flag("--tsv", as_tsv, "Tab-separated output")->excludes(json_flag);
  CLI11_PARSE(app, argc, argv);

  try {
    if (!std::filesystem::exists(journal)) {
      throw aa::Error(aa::ErrorCode::UnreadableSource, "no journal at " + journal);
    }
    const auto snapshot = aa::server::snapshot_of_journal(journal);
    aa::stats::TokenOptions options;
    options.stopwords = stopwords_file ? read_stopwords(*stopwords_file) : aa::stats::default_stopwords();
    options.exclude_tags = !include_tags;
    options.exclude_machine = !include_machine;

    if (report == "summary") {
      const auto s = aa::stats::summarize(snapshot);
      if (as_tsv) {
        std::cout << "total\t" << s.total << "\nusers\t" << s.users << "\nsessions\t" << s.sessions
                  << "\nscreencasts\t" << s.screencasts << "\nreviews\t" << s.reviews << "\nmean_score\t"
                  << (s.mean_score ? std::to_string(*s.mean_score) : "") << "\n";
        for (const auto& [k, c] : s.by_kind) std::cout << "kind:" << k << "\t" << c << "\n";
        for (const auto& [u, c] : s.by_user) std::cout << "user:" << u << "\t" << c << "\n";
      } else {
        std::cout << aa::stats::to_json(s).dump(2) << "\n";
      }
    } else if (report.starts_with("histogram:")) {
      auto scale = aa::stats::scale_from_string(report.substr(10));
      if (!scale) throw aa::Error(aa::ErrorCode::BadConfig, "unknown scale '" + report.substr(10) + "'");
      const auto h = aa::stats::histogram(snapshot.shouts, *scale);
      if (as_tsv) {
        for (const auto& [label, count] : h.bins) std::cout << label << "\t" << count << "\n";
      } else {
        std::cout << aa::stats::to_json(h).dump(2) << "\n";
      }
    } else if (report == "tokens") {
      const auto t = aa::stats::token_table(
          snapshot.shouts, stemmer == "suffix" ? aa::stats::Stemmer(aa::stats::suffix_stem) : aa::stats::identity_stem,
          options);
      if (as_tsv) {
        for (const auto& [tok, c] : t.tokens) std::cout << "token\t" << tok << "\t" << c << "\n";
        for (const auto& [rad, c] : t.radicals) std::cout << "radical\t" << rad << "\t" << c << "\n";
      } else {
        std::cout << aa::stats::to_json(t).dump(2) << "\n";
      }
    } else if (report == "graph") {
      const auto g = aa::stats::cooccurrence(snapshot.shouts, options);
      if (as_tsv) {
        for (const auto& [pair, w] : g.edges) std::cout << pair.first << "\t" << pair.second << "\t" << w << "\n";
      } else {
        std::cout << aa::stats::to_json(g).dump(2) << "\n";
      }
    } else {
      throw aa::Error(aa::ErrorCode::BadConfig, "unknown report '" + report + "'");
    }
  } catch (const aa::Error& e) {
    std::cerr << "aa-stats: " << aa::to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}

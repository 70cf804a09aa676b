// aa-mine: harvest shouts from chat logs and database dumps.

#include <CLI11.hpp>
#include <iostream>

#include "aa/config.hpp"
#include "aa/miner.hpp"
#include "aa/store.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mine AA shouts from historical sources"};
  std::vector<std::string> sources;
  std::string mode = "prefix";
  std::string keying = "text";
  std::optional<std::string> corpus;
  std::string ubiquitous = "aao0";
  bool dry_run = false;
  app.add_option("--source", sources, "Source spec file ([source] sections)")->required();
  app.add_option("--mode", mode, "prefix | tags | all")->check(CLI::IsMember({"prefix", "tags", "all"}));
  app.add_option("--corpus", corpus, "Journal holding the existing corpus; mined shouts are appended to it");
  app.add_option("--keying", keying, "Duplicate key: text | nick-text")->check(CLI::IsMember({"text", "nick-text"}));
  app.add_option("--ubiquitous", ubiquitous, "Comma-separated tags for --mode tags");
  app.add_flag("--dry-run", dry_run, "Report without importing");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!dry_run && !corpus) {
      throw aa::Error(aa::ErrorCode::BadConfig, "--corpus is required unless --dry-run is given");
    }
    std::vector<aa::miner::SourceSpec> specs;
    for (const auto& s : sources) {
      auto loaded = aa::miner::load_specs(s);
      specs.insert(specs.end(), loaded.begin(), loaded.end());
    }
    aa::miner::MineOptions options;
    options.mode = *aa::miner::select_mode_from_string(mode);
    options.key = keying == "text" ? aa::miner::DedupKey::Text : aa::miner::DedupKey::NickText;
    options.ubiquitous = aa::parse_word_set(ubiquitous);
    options.dry_run = dry_run;

    std::unique_ptr<aa::server::Store> store;
    std::set<std::string> known;
    if (corpus) {
      store = std::make_unique<aa::server::Store>(std::make_unique<aa::server::FileJournal>(*corpus));
      known = aa::miner::corpus_of(store->snapshot().shouts, options.key);
    }
    auto outcome = aa::miner::mine(specs, options, known, store.get());
    auto report = aa::miner::to_json(outcome.report);
    report["imported"] = outcome.imported.size();
    report["dry_run"] = dry_run;
    std::cout << report.dump(2) << "\n";
  } catch (const aa::Error& e) {
    std::cerr << "aa-mine: " << aa::to_string(e.code()) << ": " << e.what() << "\n";
    return e.code() == aa::ErrorCode::JournalFailure ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "aa-mine: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

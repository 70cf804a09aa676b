#pragma once

// Grammar of AA messages: the kind is dictated by the first word, tags are
// '#'/'+' prefixed tokens, and lexicon words at either end of a shout act as
// word tags.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aa/model.hpp"

namespace aa::parser {

struct ParserConfig {
  std::set<std::string> ubiquitous{"aao0"};
  std::set<std::string> word_lexicon;
  std::set<std::string> promo_keywords{"meetup", "event", "workshop", "conference", "hackathon",
                                       "party", "festival", "launch"};
  std::set<std::string> greetings{"test", "teste", "hello", "oi"};
  std::size_t min_words = 3;
};

struct ParseResult {
  MessageKind kind;
  std::string clean_text;
  std::vector<Tag> tags;
  bool ubiquitous = false;

  friend bool operator==(const ParseResult&, const ParseResult&) = default;
};

struct TagExtraction {
  std::vector<Tag> tags;
  std::string clean_text;
};

// Throws EmptyMessage for blank input. Never yields LostTimeslot.
MessageKind classify_kind(std::string_view raw);

// Never throws. Tokens that are nothing but markers are dropped from the
// clean text without producing a tag.
TagExtraction extract_tags(std::string_view raw);

std::vector<Tag> detect_word_tags(std::string_view raw, const std::set<std::string>& lexicon);

// Rule-based; only Shout-kind messages are flagged.
std::optional<DeviationKind> flag_deviation(const ParseResult& parsed, const ParserConfig& config = {});

ParseResult parse(std::string_view raw, const ParserConfig& config = {});

// Fills kind, tags and deviation of `shout` from its message.
void classify(Shout& shout, const ParserConfig& config = {});

}  // namespace aa::parser

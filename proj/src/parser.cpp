#include "aa/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "aa/text.hpp"

namespace aa::parser {

namespace {

bool is_marker(char c) { return c == '#' || c == '+'; }

bool is_tag_token(std::string_view token) { return !token.empty() && is_marker(token.front()); }

std::string tag_name(std::string_view token) {
  while (!token.empty() && is_marker(token.front())) token.remove_prefix(1);
  return to_lower(strip_trailing_punct(token));
}

std::string plain_word(std::string_view token) { return to_lower(strip_trailing_punct(token)); }

bool is_media(std::string_view token) {
  static constexpr std::array<std::string_view, 11> kExtensions{
      ".png", ".jpg", ".jpeg", ".gif", ".svg", ".mp4", ".webm", ".ogg", ".mp3", ".pdf", ".ogv"};
  const auto lower = to_lower(strip_trailing_punct(token));
  return std::any_of(kExtensions.begin(), kExtensions.end(),
                     [&](std::string_view ext) { return lower.ends_with(ext); });
}

bool has_alnum(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80;
  });
}

}  // namespace

MessageKind classify_kind(std::string_view raw) {
  const auto tokens = split_whitespace(raw);
  if (tokens.empty()) throw Error(ErrorCode::EmptyMessage, "message is empty");
  const auto first = plain_word(tokens.front());
  if (first == "start") return MessageKind::start();
  if (first == "stop") return MessageKind::stop();
  if (first == "push") return MessageKind::push();
  if (first == "tickets" || first == "milestones") return MessageKind::query(first);
  return MessageKind::shout();
}

TagExtraction extract_tags(std::string_view raw) {
  TagExtraction out;
  for (auto token : split_whitespace(raw)) {
    if (is_tag_token(token)) {
      auto name = tag_name(token);
      if (name.empty()) continue;
      if (token.front() == '#') {
        out.tags.push_back(Tag::hash(std::move(name)));
      } else {
        out.tags.push_back(Tag::plus(std::move(name)));
      }
      continue;
    }
    if (!out.clean_text.empty()) out.clean_text += ' ';
    out.clean_text.append(token);
  }
  return out;
}

std::vector<Tag> detect_word_tags(std::string_view raw, const std::set<std::string>& lexicon) {
  std::vector<std::string> words;
  for (auto token : split_whitespace(raw)) {
    if (!is_tag_token(token)) words.push_back(plain_word(token));
  }
  std::vector<Tag> out;
  if (words.empty() || lexicon.empty()) return out;
  if (lexicon.contains(words.front())) out.push_back(Tag::word(words.front()));
  if (words.size() > 1 && lexicon.contains(words.back()) && words.back() != words.front()) {
    out.push_back(Tag::word(words.back()));
  }
  return out;
}

std::optional<DeviationKind> flag_deviation(const ParseResult& parsed, const ParserConfig& config) {
  if (!parsed.kind.is(MessageKind::Variant::Shout)) return std::nullopt;

  bool has_url = false;
  bool has_media = false;
  bool promo = false;
  std::vector<std::string> words;
  for (auto token : split_whitespace(parsed.clean_text)) {
    if (is_url(token)) {
      has_url = true;
      continue;
    }
    if (is_media(token)) {
      has_media = true;
      continue;
    }
    auto word = plain_word(token);
    if (!has_alnum(word)) continue;
    if (config.promo_keywords.contains(word)) promo = true;
    words.push_back(std::move(word));
  }

  if (promo && has_url) return DeviationKind::Advertising;
  if ((has_url || has_media) && words.size() < config.min_words) {
    return DeviationKind::ProductExhibitionism;
  }
  if (!words.empty() && !has_url && !has_media &&
      std::all_of(words.begin(), words.end(),
                  [&](const std::string& w) { return config.greetings.contains(w); })) {
    return DeviationKind::IntroTest;
  }
  return std::nullopt;
}

ParseResult parse(std::string_view raw, const ParserConfig& config) {
  ParseResult result;
  result.kind = classify_kind(raw);
  auto extraction = extract_tags(raw);
  result.clean_text = std::move(extraction.clean_text);
  result.tags = std::move(extraction.tags);
  for (auto& tag : detect_word_tags(raw, config.word_lexicon)) result.tags.push_back(std::move(tag));
  result.ubiquitous = std::any_of(result.tags.begin(), result.tags.end(), [&](const Tag& t) {
    return t.form != TagForm::Word && config.ubiquitous.contains(t.name);
  });
  return result;
}

void classify(Shout& shout, const ParserConfig& config) {
  auto parsed = parse(shout.message, config);
  shout.deviation = flag_deviation(parsed, config);
  shout.kind = std::move(parsed.kind);
  shout.tags = std::move(parsed.tags);
}

}  // namespace aa::parser

#include <doctest.h>

#include <random>

#include "aa/parser.hpp"
#include "aa/text.hpp"

using namespace aa;
using namespace aa::parser;
using V = MessageKind::Variant;

TEST_CASE("kind is dictated by the first word") {
  CHECK(classify_kind("start").is(V::Start));
  CHECK(classify_kind("stop wrapping up refactor").is(V::Stop));
  CHECK(classify_kind("push").is(V::Push));
  CHECK(classify_kind("writing parser tests #aa").is(V::Shout));
  CHECK(classify_kind("START").is(V::Start));
  CHECK(classify_kind("Stop.").is(V::Stop));
  CHECK(classify_kind("tickets") == MessageKind::query("tickets"));
  CHECK(classify_kind("milestones for june") == MessageKind::query("milestones"));
  CHECK(classify_kind("restart the server").is(V::Shout));
  CHECK(classify_kind("I will stop now").is(V::Shout));
  try {
    classify_kind("  \t ");
    FAIL("expected EmptyMessage");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyMessage);
  }
}

TEST_CASE("hash and plus tags") {
  auto r = extract_tags("fixing build #coding");
  CHECK(r.tags == std::vector<Tag>{Tag::hash("coding")});
  CHECK(r.clean_text == "fixing build");

  r = extract_tags("+django models for sessions +sna");
  CHECK(r.tags == std::vector<Tag>{Tag::plus("django"), Tag::plus("sna")});
  CHECK(r.clean_text == "models for sessions");

  r = extract_tags("no tags here");
  CHECK(r.tags.empty());
  CHECK(r.clean_text == "no tags here");

  r = extract_tags("");
  CHECK(r.tags.empty());
  CHECK(r.clean_text.empty());

  r = extract_tags("#AA, #Coding! and #articulation.");
  CHECK(r.tags == std::vector<Tag>{Tag::hash("aa"), Tag::hash("coding"), Tag::hash("articulation")});
  CHECK(r.clean_text == "and");

  r = extract_tags("lonely # and + markers");
  CHECK(r.tags.empty());
  CHECK(r.clean_text == "lonely and markers");
}

TEST_CASE("ubiquitous tag flag") {
  auto p = parse("shipping #aao0 from twitter");
  CHECK(p.tags == std::vector<Tag>{Tag::hash("aao0")});
  CHECK(p.ubiquitous);
  CHECK_FALSE(parse("shipping #aa from twitter").ubiquitous);
  ParserConfig custom;
  custom.ubiquitous = {"aa"};
  CHECK(parse("shipping #aa from twitter", custom).ubiquitous);
}

TEST_CASE("kind and tags are independent") {
  auto p = parse("start #aa");
  CHECK(p.kind.is(V::Start));
  CHECK(p.tags == std::vector<Tag>{Tag::hash("aa")});
}

TEST_CASE("word tags at either end") {
  const std::set<std::string> lex{"coding"};
  CHECK(detect_word_tags("coding refactor of timer", lex) == std::vector<Tag>{Tag::word("coding")});
  CHECK(detect_word_tags("refactor of timer", lex).empty());
  CHECK(detect_word_tags("timer refactor coding", lex) == std::vector<Tag>{Tag::word("coding")});
  CHECK(detect_word_tags("timer coding refactor", lex).empty());
  CHECK(detect_word_tags("Coding.", lex) == std::vector<Tag>{Tag::word("coding")});
  CHECK(detect_word_tags("anything", {}).empty());
  CHECK(detect_word_tags("coding refactor", lex)[0].scope == TagScope::UntilNextTag);
}

TEST_CASE("word tags by position, brute-force check") {
  // Oracle: a lexicon word is tagged exactly when it sits at index 0 or n-1.
  const std::vector<std::string> pool{"coding", "reading", "timer", "slot", "grid"};
  const std::set<std::string> lex{"coding", "reading"};
  std::mt19937 rng(3);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> words(1 + rng() % 5);
    for (auto& w : words) w = pool[rng() % pool.size()];
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    std::vector<Tag> expected;
    if (lex.count(words.front())) expected.push_back(Tag::word(words.front()));
    if (words.size() > 1 && lex.count(words.back()) && words.back() != words.front()) {
      expected.push_back(Tag::word(words.back()));
    }
    CHECK(detect_word_tags(text, lex) == expected);
  }
}

TEST_CASE("deviation flags") {
  auto flag = [](std::string_view text) { return flag_deviation(parse(text)); };
  CHECK(flag("come to our meetup! http://x.example") == DeviationKind::Advertising);
  CHECK(flag("test") == DeviationKind::IntroTest);
  CHECK(flag("Hello") == DeviationKind::IntroTest);
  CHECK(flag("implemented slot grid, writing tests") == std::nullopt);
  CHECK(flag("https://shop.example/new-thing") == DeviationKind::ProductExhibitionism);
  CHECK(flag("look screenshot.png") == DeviationKind::ProductExhibitionism);
  CHECK(flag("reading the article at https://x.example today") == std::nullopt);
  CHECK(flag_deviation(parse("start")) == std::nullopt);
}

TEST_CASE("classify fills the shout") {
  Shout s;
  s.message = "test #aao0";
  classify(s);
  CHECK(s.kind.is(V::Shout));
  CHECK(s.tags == std::vector<Tag>{Tag::hash("aao0")});
  CHECK(s.deviation == DeviationKind::IntroTest);
}

TEST_CASE("fuzz: parser never crashes and removes every tag") {
  std::mt19937 rng(2024);
  const std::string alphabet = "ab #+.!?,;:\t\n xyz0129-_'\"\\/\x80\xc3\xa7";
  std::size_t parsed_ok = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string text;
    const int n = static_cast<int>(rng() % 40);
    for (int k = 0; k < n; ++k) text += alphabet[rng() % alphabet.size()];
    auto ex = extract_tags(text);
    for (auto token : split_whitespace(ex.clean_text)) {
      REQUIRE_FALSE((token.front() == '#' || token.front() == '+'));
    }
    CHECK(extract_tags(ex.clean_text).tags.empty());
    for (const auto& t : ex.tags) {
      CHECK_FALSE(t.name.empty());
      CHECK(t.name.front() != '#');
      CHECK(t.name.front() != '+');
      CHECK(t.name == to_lower(t.name));
    }
    try {
      auto a = parse(text);
      auto b = parse(text);
      CHECK(a == b);
      CHECK_FALSE(a.kind.is(V::LostTimeslot));
      flag_deviation(a);
      ++parsed_ok;
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyMessage);
      CHECK(trim(text).empty());
    }
  }
  CHECK(parsed_ok > 9000);
}

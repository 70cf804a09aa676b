#include "aa/stats.hpp"

#include <algorithm>
#include <numeric>

#include "aa/text.hpp"

namespace aa::stats {

using nlohmann::json;

ActivityStats summarize(const server::StoreSnapshot& snapshot) {
  ActivityStats s;
  std::set<std::string> users;
  for (const auto& sh : snapshot.shouts) {
    ++s.by_kind[to_string(sh.kind)];
    ++s.by_user[sh.nick];
    users.insert(sh.nick);
  }
  s.total = snapshot.shouts.size();
  for (const auto& u : snapshot.users) users.insert(u.id);
  s.users = users.size();
  s.sessions = snapshot.sessions.size();
  double sum = 0;
  for (const auto& se : snapshot.sessions) {
    if (se.screencast) ++s.screencasts;
    if (se.review) {
      ++s.reviews;
      sum += se.review->score;
    }
  }
  if (s.reviews > 0) s.mean_score = sum / static_cast<double>(s.reviews);
  return s;
}

json to_json(const ActivityStats& s) {
  json j{{"total", s.total},       {"by_kind", s.by_kind},         {"by_user", s.by_user},
         {"users", s.users},       {"sessions", s.sessions},       {"screencasts", s.screencasts},
         {"reviews", s.reviews},   {"mean_score", nullptr}};
  if (s.mean_score) j["mean_score"] = *s.mean_score;
  return j;
}

std::optional<Scale> scale_from_string(std::string_view s) {
  const auto k = to_lower(trim(s));
  if (k == "second" || k == "secondofminute") return Scale::SecondOfMinute;
  if (k == "minute" || k == "minuteofhour") return Scale::MinuteOfHour;
  if (k == "hour" || k == "hourofday") return Scale::HourOfDay;
  if (k == "weekday" || k == "dayofweek") return Scale::DayOfWeek;
  if (k == "day" || k == "dayofmonth") return Scale::DayOfMonth;
  if (k == "month") return Scale::Month;
  if (k == "year") return Scale::Year;
  return std::nullopt;
}

std::string_view to_string(Scale s) {
  switch (s) {
    case Scale::SecondOfMinute: return "second";
    case Scale::MinuteOfHour: return "minute";
    case Scale::HourOfDay: return "hour";
    case Scale::DayOfWeek: return "weekday";
    case Scale::DayOfMonth: return "day";
    case Scale::Month: return "month";
    case Scale::Year: return "year";
  }
  return "";
}

namespace {

std::string two_digits(int v) {
  std::string out = std::to_string(v);
  return out.size() < 2 ? "0" + out : out;
}

std::vector<std::pair<std::string, std::size_t>> numbered(int from, int to) {
  std::vector<std::pair<std::string, std::size_t>> bins;
  for (int i = from; i <= to; ++i) bins.emplace_back(two_digits(i), 0);
  return bins;
}

}  // namespace

TemporalHistogram histogram(std::span<const Timestamp> times, Scale scale) {
  using namespace std::chrono;
  TemporalHistogram h;
  h.scale = scale;
  switch (scale) {
    case Scale::SecondOfMinute:
    case Scale::MinuteOfHour:
      h.bins = numbered(0, 59);
      break;
    case Scale::HourOfDay:
      h.bins = numbered(0, 23);
      break;
    case Scale::DayOfWeek:
      for (const char* d : {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"}) h.bins.emplace_back(d, 0);
      break;
    case Scale::DayOfMonth:
      h.bins = numbered(1, 31);
      break;
    case Scale::Month:
      for (const char* m : {"Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"}) {
        h.bins.emplace_back(m, 0);
      }
      break;
    case Scale::Year: {
      if (times.empty()) break;
      auto year_of = [](Timestamp t) { return static_cast<int>(year_month_day{floor<days>(t)}.year()); };
      int lo = year_of(times[0]), hi = lo;
      for (auto t : times) {
        lo = std::min(lo, year_of(t));
        hi = std::max(hi, year_of(t));
      }
      for (int y = lo; y <= hi; ++y) h.bins.emplace_back(std::to_string(y), 0);
      for (auto t : times) ++h.bins[static_cast<std::size_t>(year_of(t) - lo)].second;
      return h;
    }
  }
  for (auto t : times) {
    const auto day = floor<days>(t);
    const hh_mm_ss tod{t - day};
    std::size_t index = 0;
    switch (scale) {
      case Scale::SecondOfMinute: index = static_cast<std::size_t>(tod.seconds().count()); break;
      case Scale::MinuteOfHour: index = static_cast<std::size_t>(tod.minutes().count()); break;
      case Scale::HourOfDay: index = static_cast<std::size_t>(tod.hours().count()); break;
      case Scale::DayOfWeek: index = weekday{day}.iso_encoding() - 1; break;
      case Scale::DayOfMonth: index = static_cast<unsigned>(year_month_day{day}.day()) - 1; break;
      case Scale::Month: index = static_cast<unsigned>(year_month_day{day}.month()) - 1; break;
      case Scale::Year: break;
    }
    ++h.bins[index].second;
  }
  return h;
}

TemporalHistogram histogram(std::span<const Shout> shouts, Scale scale) {
  std::vector<Timestamp> times;
  times.reserve(shouts.size());
  for (const auto& s : shouts) times.push_back(s.created);
  return histogram(times, scale);
}

json to_json(const TemporalHistogram& h) {
  json bins = json::array();
  std::size_t total = 0;
  for (const auto& [label, count] : h.bins) {
    bins.push_back({{"label", label}, {"count", count}});
    total += count;
  }
  return {{"scale", to_string(h.scale)}, {"total", total}, {"bins", bins}};
}

namespace {

bool word_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c); }

bool is_tag_token(std::string_view token) {
  return !token.empty() && (token.front() == '#' || token.front() == '+');
}

void split_words(std::string_view text, const std::set<std::string>& stopwords, std::vector<std::string>& out) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (!word_byte(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size()) {
      const auto c = static_cast<unsigned char>(text[j]);
      if (word_byte(c)) {
        ++j;
      } else if ((c == '-' || c == '\'') && j + 1 < text.size() &&
                 word_byte(static_cast<unsigned char>(text[j + 1]))) {
        ++j;
      } else {
        break;
      }
    }
    auto word = to_lower(text.substr(i, j - i));
    i = j;
    const bool short_number =
        word.size() <= 2 && std::all_of(word.begin(), word.end(), [](unsigned char c) { return std::isdigit(c); });
    if (short_number || stopwords.count(word)) continue;
    out.push_back(std::move(word));
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const std::set<std::string>& stopwords) {
  std::vector<std::string> out;
  for (auto token : split_whitespace(text)) {
    if (is_tag_token(token)) continue;
    split_words(token, stopwords, out);
  }
  return out;
}

std::string identity_stem(const std::string& token) { return token; }

std::string suffix_stem(const std::string& token) {
  static const std::pair<std::string_view, std::string_view> rules[] = {
      {"ções", "ç"}, {"ção", "ç"}, {"ing", ""}, {"ed", ""}, {"es", ""}, {"s", ""},
  };
  for (const auto& [suffix, replacement] : rules) {
    if (token.size() > suffix.size() && std::string_view(token).ends_with(suffix)) {
      auto stem = token.substr(0, token.size() - suffix.size()) + std::string(replacement);
      if (stem.size() >= 3) return stem;
    }
  }
  return token;
}

std::set<std::string> default_stopwords() {
  return {"a",    "an",   "and",  "are", "as",   "at",   "be",  "but", "by",  "for", "from", "i",
          "in",   "is",   "it",   "my",  "of",   "on",   "or",  "the", "to",  "with", "this", "that",
          "o",    "os",   "as",   "e",   "de",   "da",   "do",  "das", "dos", "em",  "um",   "uma",
          "para", "com",  "que",  "no",  "na",   "nos",  "nas", "por", "se",  "eu"};
}

std::optional<std::vector<std::string>> record_tokens(const Shout& shout, const TokenOptions& options) {
  if (options.exclude_machine && shout.kind.is(MessageKind::Variant::LostTimeslot)) return std::nullopt;
  auto words = split_whitespace(shout.message);
  // The leading command word of start/stop/push/query messages is control, not content.
  const bool command = !shout.kind.is(MessageKind::Variant::Shout) && !shout.kind.is(MessageKind::Variant::LostTimeslot);
  if (command && !words.empty()) words.erase(words.begin());
  std::vector<std::string> out;
  for (auto token : words) {
    if (is_tag_token(token) && options.exclude_tags) continue;
    if (is_tag_token(token)) {
      auto tag = to_lower(strip_trailing_punct(token));
      if (tag.size() > 1) out.push_back(std::move(tag));
      continue;
    }
    split_words(token, options.stopwords, out);
  }
  return out;
}

TokenTable token_table(std::span<const Shout> shouts, const Stemmer& stemmer, const TokenOptions& options) {
  TokenTable t;
  for (const auto& s : shouts) {
    auto tokens = record_tokens(s, options);
    if (!tokens) continue;
    for (auto& tok : *tokens) ++t.tokens[tok];
  }
  for (const auto& [tok, count] : t.tokens) {
    t.radicals[stemmer(tok)] += count;
    t.token_count += count;
  }
  t.vocabulary_size = t.tokens.size();
  return t;
}

json to_json(const TokenTable& t) {
  auto ranked = [](const std::map<std::string, std::size_t>& m) {
    std::vector<std::pair<std::string, std::size_t>> v(m.begin(), m.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    json arr = json::array();
    for (const auto& [k, c] : v) arr.push_back({k, c});
    return arr;
  };
  return {{"vocabulary_size", t.vocabulary_size},
          {"radical_count", t.radicals.size()},
          {"token_count", t.token_count},
          {"tokens", ranked(t.tokens)},
          {"radicals", ranked(t.radicals)}};
}

std::size_t CooccurrenceGraph::weight(const std::string& a, const std::string& b) const {
  auto it = edges.find(a < b ? std::pair{a, b} : std::pair{b, a});
  return it == edges.end() ? 0 : it->second;
}

CooccurrenceGraph cooccurrence(std::span<const Shout> shouts, const TokenOptions& options) {
  CooccurrenceGraph g;
  for (const auto& s : shouts) {
    auto tokens = record_tokens(s, options);
    if (!tokens) continue;
    const std::set<std::string> distinct(tokens->begin(), tokens->end());
    g.nodes.insert(distinct.begin(), distinct.end());
    for (auto a = distinct.begin(); a != distinct.end(); ++a) {
      for (auto b = std::next(a); b != distinct.end(); ++b) ++g.edges[{*a, *b}];
    }
  }
  for (const auto& n : g.nodes) {
    g.degree[n] = 0;
    g.strength[n] = 0;
  }
  // Union-find over node indices for the component count.
  std::map<std::string, std::size_t> index;
  for (const auto& n : g.nodes) index.emplace(n, index.size());
  std::vector<std::size_t> parent(index.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = index.size();
  for (const auto& [pair, w] : g.edges) {
    ++g.degree[pair.first];
    ++g.degree[pair.second];
    g.strength[pair.first] += w;
    g.strength[pair.second] += w;
    auto ra = find(index[pair.first]);
    auto rb = find(index[pair.second]);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  g.components = components;
  return g;
}

json to_json(const CooccurrenceGraph& g) {
  json edges = json::array();
  for (const auto& [pair, w] : g.edges) edges.push_back({pair.first, pair.second, w});
  json nodes = json::array();
  for (const auto& n : g.nodes) nodes.push_back({{"token", n}, {"degree", g.degree.at(n)}, {"strength", g.strength.at(n)}});
  return {{"node_count", g.nodes.size()}, {"edge_count", g.edges.size()}, {"components", g.components},
          {"nodes", nodes}, {"edges", edges}};
}

}  // namespace aa::stats

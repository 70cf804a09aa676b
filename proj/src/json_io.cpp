#include "aa/json_io.hpp"

namespace aa {

using nlohmann::json;

namespace {

Timestamp time_field(const json& j, const char* key) {
  auto parsed = parse_iso8601(j.at(key).get<std::string>());
  if (!parsed) throw Error(ErrorCode::BadRequest, std::string("bad timestamp in field ") + key);
  return *parsed;
}

TagForm tag_form(std::string_view s) {
  if (s == "hash") return TagForm::Hash;
  if (s == "plus") return TagForm::Plus;
  if (s == "word") return TagForm::Word;
  throw Error(ErrorCode::BadRequest, "unknown tag form");
}

TagScope tag_scope(std::string_view s) {
  if (s == "shout") return TagScope::ShoutOnly;
  if (s == "session") return TagScope::Session;
  if (s == "until_next_tag") return TagScope::UntilNextTag;
  throw Error(ErrorCode::BadRequest, "unknown tag scope");
}

}  // namespace

void to_json(json& j, const Tag& t) {
  j = json{{"form", to_string(t.form)}, {"name", t.name}, {"scope", to_string(t.scope)}};
}

void from_json(const json& j, Tag& t) {
  t.form = tag_form(j.at("form").get<std::string>());
  t.name = j.at("name").get<std::string>();
  t.scope = tag_scope(j.at("scope").get<std::string>());
}

void to_json(json& j, const Shout& s) {
  j = json{{"id", s.id},
           {"nick", s.nick},
           {"message", s.message},
           {"created", format_iso8601(s.created)},
           {"kind", to_string(s.kind)},
           {"tags", s.tags},
           {"source", to_string(s.source)}};
  if (s.client_created) j["client_created"] = format_iso8601(*s.client_created);
  if (s.session_ref) j["session"] = *s.session_ref;
  if (s.deviation) j["deviation"] = to_string(*s.deviation);
}

void from_json(const json& j, Shout& s) {
  s.id = j.at("id").get<std::string>();
  s.nick = j.at("nick").get<std::string>();
  s.message = j.at("message").get<std::string>();
  s.created = time_field(j, "created");
  auto kind = kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::BadRequest, "unknown message kind");
  s.kind = *kind;
  s.tags = j.value("tags", std::vector<Tag>{});
  auto source = source_from_string(j.value("source", std::string("http")));
  if (!source) throw Error(ErrorCode::BadRequest, "unknown source");
  s.source = *source;
  s.client_created.reset();
  if (j.contains("client_created")) s.client_created = time_field(j, "client_created");
  s.session_ref.reset();
  if (j.contains("session")) s.session_ref = j.at("session").get<std::string>();
  s.deviation.reset();
  if (j.contains("deviation")) s.deviation = deviation_from_string(j.at("deviation").get<std::string>());
}

void to_json(json& j, const ValidationReview& r) {
  j = json{{"session", r.session},
           {"reviewer", r.reviewer},
           {"score", r.score},
           {"created", format_iso8601(r.created)}};
  if (r.comment) j["comment"] = *r.comment;
}

void from_json(const json& j, ValidationReview& r) {
  r.session = j.at("session").get<std::string>();
  r.reviewer = j.at("reviewer").get<std::string>();
  r.score = j.at("score").get<double>();
  r.created = time_field(j, "created");
  r.comment.reset();
  if (j.contains("comment")) r.comment = j.at("comment").get<std::string>();
}

void to_json(json& j, const Session& s) {
  j = json{{"id", s.id},
           {"user", s.user},
           {"origin", to_string(s.origin)},
           {"start", format_iso8601(s.start)},
           {"end", format_iso8601(s.end)},
           {"slot", s.slot_duration.count()},
           {"shouts", s.shouts},
           {"lost_slots", s.lost_slots},
           {"open", s.open}};
  if (s.screencast) j["screencast"] = *s.screencast;
  if (s.review) j["review"] = *s.review;
}

void from_json(const json& j, Session& s) {
  s.id = j.at("id").get<std::string>();
  s.user = j.at("user").get<std::string>();
  s.origin = j.value("origin", std::string("explicit")) == "inferred" ? SessionOrigin::Inferred
                                                                      : SessionOrigin::Explicit;
  s.start = time_field(j, "start");
  s.end = time_field(j, "end");
  s.slot_duration = Seconds{j.value("slot", kDefaultSlot.count())};
  s.shouts = j.value("shouts", std::vector<std::string>{});
  s.lost_slots = j.value("lost_slots", std::vector<std::int64_t>{});
  s.open = j.value("open", false);
  s.screencast.reset();
  if (j.contains("screencast")) s.screencast = j.at("screencast").get<std::string>();
  s.review.reset();
  if (j.contains("review")) s.review = j.at("review").get<ValidationReview>();
}

void to_json(json& j, const User& u) {
  j = json{{"id", u.id}, {"nicks", u.nicks}, {"emails", u.emails}};
}

json listing_json(const Shout& s) {
  return json{{"id", s.id},
              {"nick", s.nick},
              {"message", s.message},
              {"created", format_iso8601(s.created)},
              {"kind", to_string(s.kind)},
              {"tags", s.tags},
              {"source", to_string(s.source)}};
}

namespace session {

void to_json(json& j, const ConformanceReport& r) {
  j = json::object();
  j["ideal"] = r.ideal;
  j["lost_slots"] = r.lost_slots;
  auto& per = j["per_shout"] = json::array();
  for (const auto& c : r.per_shout) {
    per.push_back({{"shout", c.shout_id},
                   {"slot", c.slot},
                   {"offset", c.offset.count()},
                   {"within_tolerance", c.within_tolerance}});
  }
}

}  // namespace session

}  // namespace aa

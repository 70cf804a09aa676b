#include "aa/model.hpp"

#include "aa/text.hpp"

namespace aa {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyNick: return "EmptyNick";
    case ErrorCode::EmptyMessage: return "EmptyMessage";
    case ErrorCode::BeforeAnchor: return "BeforeAnchor";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::EmptySession: return "EmptySession";
    case ErrorCode::NotLost: return "NotLost";
    case ErrorCode::DuplicateLostSlot: return "DuplicateLostSlot";
    case ErrorCode::MixedUsers: return "MixedUsers";
    case ErrorCode::UnsortedInput: return "UnsortedInput";
    case ErrorCode::NoEligibleValidator: return "NoEligibleValidator";
    case ErrorCode::SelfReview: return "SelfReview";
    case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::NoOpenSession: return "NoOpenSession";
    case ErrorCode::BadFilter: return "BadFilter";
    case ErrorCode::BadUrl: return "BadUrl";
    case ErrorCode::BadPattern: return "BadPattern";
    case ErrorCode::BadMapping: return "BadMapping";
    case ErrorCode::UnreadableSource: return "UnreadableSource";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::JournalFailure: return "JournalFailure";
    case ErrorCode::Network: return "Network";
    case ErrorCode::ServerError: return "ServerError";
  }
  return "Unknown";
}

std::optional<ErrorCode> error_code_from_string(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::ServerError); ++i) {
    const auto code = static_cast<ErrorCode>(i);
    if (to_string(code) == name) return code;
  }
  return std::nullopt;
}

std::string normalize_nick(std::string_view raw) {
  auto nick = to_lower(trim(raw));
  if (nick.empty()) throw Error(ErrorCode::EmptyNick, "nick is empty");
  return nick;
}

std::string_view to_string(Source s) {
  switch (s) {
    case Source::Http: return "http";
    case Source::Chat: return "chat";
    case Source::Mined: return "mined";
  }
  return "http";
}

std::optional<Source> source_from_string(std::string_view s) {
  if (s == "http") return Source::Http;
  if (s == "chat") return Source::Chat;
  if (s == "mined") return Source::Mined;
  return std::nullopt;
}

std::string_view to_string(DeviationKind d) {
  switch (d) {
    case DeviationKind::Advertising: return "advertising";
    case DeviationKind::ProductExhibitionism: return "product_exhibitionism";
    case DeviationKind::IntroTest: return "intro_test";
  }
  return "advertising";
}

std::optional<DeviationKind> deviation_from_string(std::string_view s) {
  if (s == "advertising") return DeviationKind::Advertising;
  if (s == "product_exhibitionism") return DeviationKind::ProductExhibitionism;
  if (s == "intro_test") return DeviationKind::IntroTest;
  return std::nullopt;
}

std::string_view to_string(TagForm f) {
  switch (f) {
    case TagForm::Hash: return "hash";
    case TagForm::Plus: return "plus";
    case TagForm::Word: return "word";
  }
  return "hash";
}

std::string_view to_string(TagScope s) {
  switch (s) {
    case TagScope::ShoutOnly: return "shout";
    case TagScope::Session: return "session";
    case TagScope::UntilNextTag: return "until_next_tag";
  }
  return "shout";
}

std::string_view to_string(SessionOrigin o) {
  return o == SessionOrigin::Explicit ? "explicit" : "inferred";
}

std::string to_string(const MessageKind& k) {
  using V = MessageKind::Variant;
  switch (k.variant) {
    case V::Start: return "start";
    case V::Stop: return "stop";
    case V::Push: return "push";
    case V::Shout: return "shout";
    case V::LostTimeslot: return "lost_timeslot";
    case V::Query: return "query:" + k.topic;
  }
  return "shout";
}

std::optional<MessageKind> kind_from_string(std::string_view s) {
  if (s == "start") return MessageKind::start();
  if (s == "stop") return MessageKind::stop();
  if (s == "push") return MessageKind::push();
  if (s == "shout") return MessageKind::shout();
  if (s == "lost_timeslot") return MessageKind::lost_timeslot();
  if (s.starts_with("query:")) return MessageKind::query(std::string(s.substr(6)));
  return std::nullopt;
}

std::string display(const Tag& t) {
  switch (t.form) {
    case TagForm::Hash: return "#" + t.name;
    case TagForm::Plus: return "+" + t.name;
    case TagForm::Word: return t.name;
  }
  return t.name;
}

}  // namespace aa

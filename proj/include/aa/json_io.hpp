#pragma once

#include <nlohmann/json.hpp>

#include "aa/model.hpp"
#include "aa/session.hpp"

namespace aa {

void to_json(nlohmann::json& j, const Tag& t);
void from_json(const nlohmann::json& j, Tag& t);
void to_json(nlohmann::json& j, const Shout& s);
void from_json(const nlohmann::json& j, Shout& s);
void to_json(nlohmann::json& j, const ValidationReview& r);
void from_json(const nlohmann::json& j, ValidationReview& r);
void to_json(nlohmann::json& j, const Session& s);
void from_json(const nlohmann::json& j, Session& s);
void to_json(nlohmann::json& j, const User& u);

// The public listing object: {id, nick, message, created, kind, tags, source}.
nlohmann::json listing_json(const Shout& s);

namespace session {
void to_json(nlohmann::json& j, const ConformanceReport& r);
}

}  // namespace aa

#include "aa/client.hpp"

#include <poll.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "aa/config.hpp"
#include "aa/journal.hpp"
#include "aa/json_io.hpp"
#include "aa/parser.hpp"
#include "aa/session.hpp"
#include "aa/text.hpp"

namespace aa::client {

using nlohmann::json;

namespace {

std::filesystem::path home_dir() {
  if (const char* home = std::getenv("HOME"); home && *home) return home;
  return ".";
}

bool transient(int status) { return status >= 500; }

}  // namespace

void ClientConfig::validate() const {
  normalize_nick(nick);
  try {
    session::SlotGrid{Timestamp{}, slot, tolerance}.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::BadConfig, e.what());
  }
}

std::filesystem::path default_config_path() {
  if (const char* xdg = std::getenv("XDG_CONFIG_HOME"); xdg && *xdg) {
    return std::filesystem::path(xdg) / "aa" / "config";
  }
  return home_dir() / ".config" / "aa" / "config";
}

std::filesystem::path default_spool_path() {
  if (const char* xdg = std::getenv("XDG_DATA_HOME"); xdg && *xdg) {
    return std::filesystem::path(xdg) / "aa" / "spool.jsonl";
  }
  return home_dir() / ".local" / "share" / "aa" / "spool.jsonl";
}

ClientConfig load_client_config(const std::optional<std::filesystem::path>& path,
                                const std::map<std::string, std::string>& env) {
  Config file;
  if (path) {
    file = Config::load(*path);
  } else if (std::filesystem::exists(default_config_path())) {
    file = Config::load(default_config_path());
  }
  file.apply_env(env, "AA_");

  ClientConfig out;
  out.server_url = file.get_or("server", out.server_url);
  out.nick = file.get_or("nick", "");
  if (out.nick.empty()) {
    if (auto it = env.find("USER"); it != env.end()) out.nick = it->second;
  }
  if (auto d = file.duration("slot")) out.slot = *d;
  if (auto d = file.duration("tolerance")) out.tolerance = *d;
  out.offline_spool = file.get_or("spool", default_spool_path().string());
  return out;
}

// ---------------------------------------------------------------------------
// Spool

void Spool::append(const Shout& shout) {
  auto records = load();
  records.push_back(shout);
  replace(records);
}

std::vector<Shout> Spool::load() const {
  std::vector<Shout> out;
  for (auto& record : server::read_journal_file(path_)) {
    if (record.shout) out.push_back(std::move(*record.shout));
  }
  return out;
}

void Spool::replace(std::span<const Shout> remaining) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  auto tmp = path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::JournalFailure, "cannot write spool " + tmp.string());
    std::uint64_t seq = 0;
    for (const auto& s : remaining) {
      server::JournalRecord r;
      r.seq = ++seq;
      r.written = s.client_created.value_or(s.created);
      r.shout = s;
      out << server::encode_record(r) << '\n';
    }
    out.flush();
    if (!out) throw Error(ErrorCode::JournalFailure, "cannot write spool " + tmp.string());
  }
  std::filesystem::rename(tmp, path_);
}

// ---------------------------------------------------------------------------
// Client

Client::Client(ClientConfig config, Transport& transport, std::function<Timestamp()> clock)
    : config_(std::move(config)), transport_(transport), clock_(std::move(clock)), spool_(config_.offline_spool) {
  config_.nick = normalize_nick(config_.nick);
}

json Client::checked(const Response& response) const {
  json body;
  try {
    body = json::parse(response.body);
  } catch (const json::exception&) {
    if (response.status >= 400) {
      throw Error(ErrorCode::ServerError, "server answered " + std::to_string(response.status));
    }
    return json(response.body);
  }
  if (response.status >= 400) {
    const auto name = body.value("error", std::string("ServerError"));
    throw Error(error_code_from_string(name).value_or(ErrorCode::ServerError),
                body.value("message", name));
  }
  return body;
}

ShoutOutcome Client::shout(std::string_view message) {
  if (trim(message).empty()) throw Error(ErrorCode::EmptyMessage, "message is empty");
  const auto now = clock_();
  ShoutOutcome outcome;
  try {
    auto response = transport_.post("/shout", {{"nick", config_.nick}, {"msg", std::string(message)}});
    if (!transient(response.status)) {
      auto body = checked(response);
      outcome.id = body.at("id").get<std::string>();
      return outcome;
    }
    outcome.detail = "server error " + std::to_string(response.status);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Network) throw;
    outcome.detail = e.what();
  }

  Shout local;
  local.id = "local-" + std::to_string(to_unix(now)) + "-" + std::to_string(spool_.size() + 1);
  local.nick = config_.nick;
  local.message = std::string(message);
  local.created = now;
  local.client_created = now;
  parser::classify(local);
  spool_.append(local);
  outcome.delivery = Delivery::Spooled;
  return outcome;
}

PushOutcome Client::push() {
  PushOutcome outcome;
  auto pending = spool_.load();
  std::size_t i = 0;
  while (i < pending.size()) {
    const auto& s = pending[i];
    const auto stamp = format_iso8601(s.client_created.value_or(s.created));
    try {
      auto response = transport_.post("/shout", {{"nick", s.nick}, {"msg", s.message}, {"client_created", stamp}});
      if (transient(response.status)) {
        outcome.error = "server error " + std::to_string(response.status);
        break;
      }
      if (response.status >= 400) {
        ++outcome.rejected;
      } else {
        ++outcome.sent;
      }
    } catch (const Error& e) {
      outcome.error = e.what();
      break;
    }
    ++i;
    spool_.replace(std::span<const Shout>(pending).subspan(i));
  }
  outcome.remaining = pending.size() - i;
  return outcome;
}

json Client::start() {
  return checked(transport_.post("/message", {{"nick", config_.nick}, {"msg", "start"}}));
}

json Client::stop() {
  auto pushed = push();
  auto result = checked(transport_.post("/message", {{"nick", config_.nick}, {"msg", "stop"}}));
  result["spool"] = {{"sent", pushed.sent}, {"remaining", pushed.remaining}};
  return result;
}

json Client::lost(const std::string& session_id, std::int64_t slot) {
  return checked(transport_.post("/session/" + session_id + "/lost", {{"slot", std::to_string(slot)}}));
}

json Client::session(const std::string& session_id) {
  return checked(transport_.get("/session/" + session_id, {}));
}

json Client::report(std::optional<std::size_t> latest) {
  Params params;
  if (latest) params.emplace_back("n", std::to_string(*latest));
  return checked(transport_.get("/report", params));
}

json Client::status() {
  json out;
  out["nick"] = config_.nick;
  out["server"] = config_.server_url;
  out["spooled"] = spool_.size();
  try {
    const auto rep = report(0);
    out["reachable"] = true;
    out["open_session"] = nullptr;
    for (const auto& s : rep.at("open_sessions")) {
      if (s.at("user") == config_.nick) out["open_session"] = s;
    }
  } catch (const Error& e) {
    out["reachable"] = false;
    out["error"] = e.what();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Clocks and prompts

void SystemLoopClock::sleep_until(Timestamp t) { std::this_thread::sleep_until(t); }

void ManualClock::sleep_until(Timestamp t) {
  auto target = to_unix(t);
  auto current = now_.load();
  while (current < target && !now_.compare_exchange_weak(current, target)) {
  }
}

PromptReply FdPrompt::ask(std::int64_t slot, Timestamp deadline) {
  out_ << "[slot " << slot + 1 << "] what are you working on? " << std::flush;
  while (true) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      auto line = std::string(trim(std::string_view(buffer_).substr(0, nl)));
      buffer_.erase(0, nl + 1);
      if (line.empty()) continue;
      if (to_lower(line) == "stop") return {PromptReply::Kind::Stop, {}};
      return {PromptReply::Kind::Answer, line};
    }
    // Input that is already waiting still counts once the window has closed.
    const auto remaining = std::max(Seconds{0}, deadline - clock_.now());
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::chrono::milliseconds(remaining).count()));
    if (ready < 0) return {PromptReply::Kind::Stop, {}};
    if (ready == 0) {
      if (remaining > Seconds{0}) continue;
      out_ << "\n";
      return {PromptReply::Kind::Timeout, {}};
    }
    char chunk[512];
    const auto n = ::read(fd_, chunk, sizeof chunk);
    if (n <= 0) {
      if (!trim(buffer_).empty()) {
        buffer_ += '\n';
        continue;
      }
      return {PromptReply::Kind::Stop, {}};
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

// ---------------------------------------------------------------------------
// Session loop

SessionSummary SessionLoop::run() {
  SessionSummary summary;
  const auto started = client_.start();
  summary.session_id = started.at("session").at("id").get<std::string>();
  const auto anchor = clock_.now();
  const auto slot = client_.config().slot;
  const auto tolerance = client_.config().tolerance;
  out_ << "session " << summary.session_id << " started at " << format_iso8601(anchor) << "\n";

  for (std::size_t i = 0; i < slots_; ++i) {
    const auto due = anchor + static_cast<std::int64_t>(i) * slot;
    clock_.sleep_until(due);
    summary.prompt_times.push_back(clock_.now());
    const auto reply = prompts_.ask(static_cast<std::int64_t>(i), due + tolerance);
    if (reply.kind == PromptReply::Kind::Stop) break;
    if (reply.kind == PromptReply::Kind::Answer) {
      const auto outcome = client_.shout(reply.text);
      ++summary.answered;
      if (outcome.delivery == Delivery::Spooled) out_ << "  spooled (" << outcome.detail << ")\n";
      continue;
    }
    clock_.sleep_until(due + tolerance + Seconds{1});
    try {
      client_.lost(summary.session_id, static_cast<std::int64_t>(i));
      summary.lost.push_back(static_cast<std::int64_t>(i));
      out_ << "  slot " << i + 1 << " recorded as lost\n";
    } catch (const Error& e) {
      out_ << "  could not record lost slot " << i + 1 << ": " << e.what() << "\n";
    }
  }

  summary.stop_result = client_.stop();
  out_ << describe_stop(summary.stop_result);
  return summary;
}

std::string describe_stop(const json& stop_result) {
  std::ostringstream out;
  if (stop_result.contains("session")) {
    const auto& s = stop_result.at("session");
    out << "session " << s.value("id", "") << " closed (" << s.value("start", "") << " .. "
        << s.value("end", "") << ")\n";
  }
  if (stop_result.contains("conformance")) {
    const auto& c = stop_result.at("conformance");
    out << "  shouts: " << c.at("per_shout").size() << ", lost slots: " << c.at("lost_slots").dump()
        << ", ideal: " << (c.at("ideal").get<bool>() ? "yes" : "no") << "\n";
    for (const auto& p : c.at("per_shout")) {
      out << "    " << p.value("shout", "") << " slot " << p.value("slot", 0) << " offset "
          << p.value("offset", 0) << "s" << (p.value("within_tolerance", false) ? "" : " (late/early)") << "\n";
    }
  } else if (stop_result.contains("note")) {
    out << "  " << stop_result.at("note").get<std::string>() << "\n";
  }
  if (stop_result.contains("validator")) {
    out << "  validator: " << stop_result.at("validator").get<std::string>() << "\n";
  }
  return out.str();
}

}  // namespace aa::client

#include "aa/http_server.hpp"

#include <charconv>
#include <stdexcept>
#include <thread>

#include <httplib.h>

#include "aa/json_io.hpp"

namespace aa::server {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession: return 404;
    case ErrorCode::NoOpenSession:
    case ErrorCode::NotLost:
    case ErrorCode::DuplicateLostSlot: return 409;
    case ErrorCode::JournalFailure:
    case ErrorCode::ServerError: return 500;
    default: return 400;
  }
}

namespace {

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

std::string required(const httplib::Request& req, const char* name, ErrorCode missing) {
  auto v = param(req, name);
  if (!v) throw Error(missing, std::string("missing parameter ") + name);
  return *v;
}

template <typename T>
T number(const std::string& text, const char* name) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::BadRequest, std::string("parameter ") + name + " is not a number");
  }
  return value;
}

std::optional<Timestamp> optional_time(const httplib::Request& req, const char* name) {
  auto v = param(req, name);
  if (!v) return std::nullopt;
  auto t = parse_iso8601(*v);
  if (!t) throw Error(ErrorCode::BadRequest, std::string("parameter ") + name + " is not ISO 8601");
  return t;
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Fn>
auto guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_json(res, {{"error", to_string(e.code())}, {"message", e.what()}}, http_status(e.code()));
    } catch (const std::exception& e) {
      send_json(res, {{"error", "ServerError"}, {"message", e.what()}}, 500);
    }
  };
}

std::vector<PushItem> push_batch(const httplib::Request& req) {
  std::vector<PushItem> batch;
  if (req.body.empty() || req.get_header_value("Content-Type").find("json") == std::string::npos) {
    return batch;
  }
  json body;
  try {
    body = json::parse(req.body);
  } catch (const json::exception&) {
    throw Error(ErrorCode::BadRequest, "push body is not JSON");
  }
  if (!body.is_array()) throw Error(ErrorCode::BadRequest, "push body must be an array");
  for (const auto& item : body) {
    PushItem p;
    p.message = item.at("msg").get<std::string>();
    if (item.contains("client_created")) {
      p.client_created = parse_iso8601(item.at("client_created").get<std::string>());
      if (!p.client_created) throw Error(ErrorCode::BadRequest, "client_created is not ISO 8601");
    }
    batch.push_back(std::move(p));
  }
  return batch;
}

}  // namespace

struct HttpServer::Impl {
  Store& store;
  httplib::Server http;
  std::thread worker;

  explicit Impl(Store& s) : store(s) { routes(); }

  void routes() {
    auto shout = guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto nick = required(req, "nick", ErrorCode::EmptyNick);
      const auto msg = required(req, "msg", ErrorCode::EmptyMessage);
      auto source = Source::Http;
      if (auto s = param(req, "source")) {
        auto parsed = source_from_string(*s);
        if (!parsed || *parsed == Source::Mined) throw Error(ErrorCode::BadRequest, "bad source");
        source = *parsed;
      }
      auto stored = store.receive_shout(nick, msg, source, optional_time(req, "client_created"));
      send_json(res, {{"id", stored.id}, {"shout", stored}});
    });
    http.Get("/shout", shout);
    http.Post("/shout", shout);

    http.Get("/shouts", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto format = param(req, "format").value_or("json");
      if (format != "json" && format != "text") throw Error(ErrorCode::BadFilter, "format must be text or json");
      const auto filter = ShoutFilter::parse(param(req, "nick"), param(req, "since"), param(req, "until"));
      if (format == "text") {
        res.set_content(store.render_listing(ListingFormat::Text, filter), "text/plain; charset=utf-8");
      } else {
        res.set_content(store.render_listing(ListingFormat::Json, filter), "application/json");
      }
    }));

    http.Post("/message", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto nick = required(req, "nick", ErrorCode::EmptyNick);
      const auto msg = required(req, "msg", ErrorCode::EmptyMessage);
      send_json(res, to_json(store.receive_message(nick, msg, push_batch(req))));
    }));

    http.Post(R"(/session/([^/]+)/screencast)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto url = required(req, "url", ErrorCode::BadUrl);
      send_json(res, store.attach_screencast(req.matches[1], url));
    }));

    http.Post(R"(/session/([^/]+)/review)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto reviewer = required(req, "reviewer", ErrorCode::EmptyNick);
      const auto score = number<double>(required(req, "score", ErrorCode::ScoreOutOfRange), "score");
      send_json(res, store.record_review(req.matches[1], reviewer, score, param(req, "comment")));
    }));

    http.Post(R"(/session/([^/]+)/lost)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto slot = number<std::int64_t>(required(req, "slot", ErrorCode::BadRequest), "slot");
      send_json(res, store.emit_lost_timeslot(req.matches[1], slot));
    }));

    http.Post(R"(/session/([^/]+)/validator)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::uint64_t seed = static_cast<std::uint64_t>(to_unix(now_utc()));
      if (auto s = param(req, "seed")) seed = number<std::uint64_t>(*s, "seed");
      const auto user = store.assign_validator(req.matches[1], seed);
      send_json(res, {{"session", std::string(req.matches[1])}, {"validator", user.id}, {"seed", seed}});
    }));

    http.Get(R"(/session/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, store.session_view(req.matches[1]));
    }));

    http.Get("/report", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::optional<std::size_t> n;
      if (auto v = param(req, "n")) n = number<std::size_t>(*v, "n");
      send_json(res, store.report(n));
    }));
  }
};

HttpServer::HttpServer(Store& store) : impl_(std::make_unique<Impl>(store)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->http.bind_to_any_port(host);
  } else if (!impl_->http.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error(ErrorCode::ServerError, "cannot bind " + host + ":" + std::to_string(port));
  impl_->worker = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return bound;
}

bool HttpServer::listen(const std::string& host, int port) { return impl_->http.listen(host, port); }

void HttpServer::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace aa::server

#include <httplib.h>

#include "aa/client.hpp"

namespace aa::client {

struct HttpTransport::Impl {
  httplib::Client http;

  Impl(const std::string& url, Seconds timeout) : http(url) {
    http.set_connection_timeout(timeout);
    http.set_read_timeout(timeout);
    http.set_write_timeout(timeout);
  }
};

namespace {

httplib::Params to_params(const Params& params) {
  httplib::Params out;
  for (const auto& [k, v] : params) out.emplace(k, v);
  return out;
}

Response unwrap(const httplib::Result& result) {
  if (!result) throw Error(ErrorCode::Network, "server unreachable: " + httplib::to_string(result.error()));
  return Response{result->status, result->body};
}

}  // namespace

HttpTransport::HttpTransport(const std::string& server_url, Seconds timeout)
    : impl_(std::make_unique<Impl>(server_url, timeout)) {}

HttpTransport::~HttpTransport() = default;

Response HttpTransport::get(const std::string& path, const Params& params) {
  return unwrap(impl_->http.Get(path, to_params(params), httplib::Headers{}));
}

Response HttpTransport::post(const std::string& path, const Params& params, const std::string& body,
                             const std::string& content_type) {
  if (body.empty()) return unwrap(impl_->http.Post(path, to_params(params)));
  // Parameters travel in the query string when the body carries a payload.
  const auto query = httplib::detail::params_to_query_str(to_params(params));
  const auto target = query.empty() ? path : path + "?" + query;
  return unwrap(impl_->http.Post(target, body, content_type.empty() ? "application/json" : content_type));
}

}  // namespace aa::client

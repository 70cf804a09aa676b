#pragma once

#include <memory>
#include <string>

#include "aa/store.hpp"

namespace aa::server {

// HTTP status for a library error code; client errors are 4xx, journal
// failures 5xx.
int http_status(ErrorCode code);

// Endpoints:
//   GET|POST /shout                 nick, msg [, source, client_created]
//   GET      /shouts                format=text|json, nick, since, until
//   POST     /message               nick, msg; push takes a JSON batch body
//   POST     /session/{id}/screencast   url
//   POST     /session/{id}/review       reviewer, score [, comment]
//   POST     /session/{id}/lost         slot
//   POST     /session/{id}/validator    [seed]
//   GET      /session/{id}
//   GET      /report                n
class HttpServer {
 public:
  explicit HttpServer(Store& store);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Serves on a background thread; port 0 picks a free port. Returns the bound port.
  int start(const std::string& host, int port);

  // Serves on the calling thread until stop().
  bool listen(const std::string& host, int port);

  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aa::server

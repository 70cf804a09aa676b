// aa-server: HTTP shout server backed by a JSON-lines journal.

#include <pthread.h>
#include <signal.h>

#include <CLI11.hpp>
#include <iostream>

#include "aa/config.hpp"
#include "aa/http_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Algorithmic Autoregulation shout server"};
  std::optional<std::string> config_path, host, journal;
  std::optional<int> port;
  app.add_option("--config", config_path, "Config file (key = value)");
  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "Port; 0 picks a free one");
  app.add_option("--journal", journal, "Journal file");
  CLI11_PARSE(app, argc, argv);

  try {
    aa::Config config;
    if (config_path) config = aa::Config::load(*config_path);
    config.apply_env();
    if (host) config.set("host", *host);
    if (port) config.set("port", std::to_string(*port));
    if (journal) config.set("journal", *journal);
    const auto settings = aa::server_config_from(config);

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    aa::server::Store store(std::make_unique<aa::server::FileJournal>(settings.journal), settings.settings);
    aa::server::HttpServer server(store);
    const int bound = server.start(settings.host, settings.port);
    std::cout << "listening on " << settings.host << ":" << bound << " journal " << settings.journal.string()
              << " (" << store.last_seq() << " records)" << std::endl;

    int received = 0;
    sigwait(&signals, &received);
    server.stop();
    std::cout << "stopped" << std::endl;
  } catch (const aa::Error& e) {
    std::cerr << "aa-server: " << aa::to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "aa-server: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

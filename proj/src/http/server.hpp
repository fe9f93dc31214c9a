#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "http/message.hpp"

namespace ufu::http {

// Minimal HTTP/1.1 server: one request per connection, each connection
// dispatched on its own thread so handlers may sleep without stalling other
// requests (the race-condition scenario depends on that).
class Server {
public:
  using Handler = std::function<HttpResponse(const HttpRequest&)>;

  // Binds and starts accepting immediately. Port 0 picks an ephemeral port.
  // Throws ErrorCode::bind_error when the address is taken or invalid.
  Server(Handler handler, const std::string& host, std::uint16_t port);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const { return port_; }

  // Orderly shutdown: stops accepting and waits for in-flight handlers.
  void stop();

private:
  void accept_loop();
  void handle_connection(int fd);

  Handler handler_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::thread accept_thread_;
  std::atomic<bool> stopping_{false};
  std::mutex stop_mutex_;
  bool stopped_ = false;

  std::mutex active_mutex_;
  std::condition_variable active_cv_;
  int active_ = 0;
};

} // namespace ufu::http

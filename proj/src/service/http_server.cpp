#include <thread>

#include <httplib.h>

#include "multiseg/service.hpp"

namespace multiseg {

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(Service& s) : service(s) {
    const auto workers = std::max<std::size_t>(1, service.config().workers);
    server.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
    server.set_payload_max_length(service.config().max_upload_bytes);
    const auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      HttpRequest r;
      r.method = req.method;
      r.path = req.path;
      r.body = req.body;
      for (const auto& [key, value] : req.params) r.query[key] = value;
      const auto out = service.handle(r);
      res.status = out.status;
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_content(out.body, out.content_type);
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                              : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace multiseg

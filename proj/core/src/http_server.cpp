#include <httplib.h>

#include "accsams/errors.hpp"
#include "accsams/service.hpp"

namespace accsams::service {

struct HttpServer::Impl {
  SessionStore& store;
  httplib::Server server;

  explicit Impl(SessionStore& s) : store(s) {
    server.set_payload_max_length(store.config().max_upload);
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string msg = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        msg = e.what();
      } catch (...) {
      }
      send(res, {500, "application/json", "{\"error\": \"InternalError\", \"message\": " + quote(msg) + "}\n", {}});
    });
    routes();
  }

  static std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') {
        out += '\\';
        out += c;
      } else if (static_cast<unsigned char>(c) < 0x20) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "\\u%04x", c);
        out += buf;
      } else {
        out += c;
      }
    }
    return out + "\"";
  }

  static void send(httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_content(r.body, r.content_type);
  }

  void routes() {
    using Req = httplib::Request;
    using Res = httplib::Response;
    server.Post("/api/documents", [this](const Req& q, Res& r) { send(r, store.create(q.body)); });
    server.Get("/api/documents", [this](const Req&, Res& r) { send(r, store.list()); });
    server.Get(R"(/api/documents/([^/]+))", [this](const Req& q, Res& r) { send(r, store.get(q.matches[1])); });
    server.Patch(R"(/api/documents/([^/]+)/blocks/([^/]+))", [this](const Req& q, Res& r) {
      send(r, store.patch_block(q.matches[1], q.matches[2], q.body));
    });
    server.Put(R"(/api/documents/([^/]+)/hierarchy)",
               [this](const Req& q, Res& r) { send(r, store.put_hierarchy(q.matches[1], q.body)); });
    server.Post(R"(/api/documents/([^/]+)/recompute)",
                [this](const Req& q, Res& r) { send(r, store.recompute(q.matches[1], q.body)); });
    server.Post(R"(/api/documents/([^/]+)/export)",
                [this](const Req& q, Res& r) { send(r, store.export_session(q.matches[1], q.body)); });
    server.Get(R"(/api/documents/([^/]+)/pages/(\d+))", [this](const Req& q, Res& r) {
      int page = 0;
      try {
        page = std::stoi(q.matches[2]);
      } catch (const std::exception&) {
        page = -1;
      }
      send(r, store.page_image(q.matches[1], page));
    });
  }
};

HttpServer::HttpServer(SessionStore& store) : impl_(std::make_unique<Impl>(store)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw Error("cannot bind " + host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

void HttpServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace accsams::service

#include "mnemo/http_api.hpp"

#include <httplib.h>

namespace mnemo {
namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ApiError(400, "bad_request", std::string("malformed JSON: ") + e.what());
  }
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, 200, f(req));
    } catch (const ApiError& e) {
      send_json(res, e.status(), e.body());
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", "internal"}, {"message", e.what()}});
    }
  };
}

}  // namespace

struct HttpApi::Impl {
  httplib::Server server;
};

HttpApi::HttpApi(StudyService& service, std::filesystem::path media_dir) : impl_(std::make_unique<Impl>()) {
  auto& s = impl_->server;
  s.Post("/sessions", guarded([&service](const httplib::Request& req) {
           return service.create_session(parse_body(req));
         }));
  s.Get(R"(/sessions/([^/]+)/step)",
        guarded([&service](const httplib::Request& req) { return service.step(req.matches[1]); }));
  s.Post(R"(/sessions/([^/]+)/advance)", guarded([&service](const httplib::Request& req) {
           return service.advance(req.matches[1], parse_body(req));
         }));
  s.Post(R"(/sessions/([^/]+)/response)", guarded([&service](const httplib::Request& req) {
           return service.submit(req.matches[1], parse_body(req));
         }));
  s.Post(R"(/sessions/([^/]+)/likert)", guarded([&service](const httplib::Request& req) {
           return service.likert(req.matches[1], parse_body(req));
         }));
  s.Get(R"(/sessions/([^/]+)/summary)",
        guarded([&service](const httplib::Request& req) { return service.summary(req.matches[1]); }));
  s.Get("/deck/meta", guarded([&service](const httplib::Request&) { return service.deck_meta(); }));
  if (std::filesystem::is_directory(media_dir)) s.set_mount_point("/media", media_dir.string());
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) send_json(res, res.status, {{"error", "not_found"}, {"message", "no such route"}});
  });
}

HttpApi::~HttpApi() = default;

int HttpApi::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpApi::listen() { return impl_->server.listen_after_bind(); }

void HttpApi::stop() { impl_->server.stop(); }

void HttpApi::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace mnemo

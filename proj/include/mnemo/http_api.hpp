#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "mnemo/service.hpp"

namespace mnemo {

/// JSON-over-HTTP front end for a StudyService:
///   POST /sessions                   GET  /sessions/{id}/step
///   POST /sessions/{id}/advance      POST /sessions/{id}/response
///   POST /sessions/{id}/likert       GET  /sessions/{id}/summary
///   GET  /deck/meta                  GET  /media/<file>
/// Errors are {"error": reason, "message": ...} with a 4xx/5xx status.
class HttpApi {
 public:
  HttpApi(StudyService& service, std::filesystem::path media_dir);
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  // Binds to `port` (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Serves until stop(); call after bind().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mnemo

#include "stub_server.hpp"

#include <chrono>

#include <httplib.h>
#include <json.hpp>

namespace revr::testing {

struct StubServer::Impl {
  httplib::Server server;
};

StubServer::StubServer(Options options) : impl_(std::make_unique<Impl>()), options_(std::move(options)) {
  impl_->server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
    const int index = requests_++;
    const int now = ++in_flight_;
    for (int seen = max_in_flight_.load(); now > seen && !max_in_flight_.compare_exchange_weak(seen, now);) {
    }
    {
      std::lock_guard lock(mu_);
      bodies_.push_back(req.body);
      auth_.push_back(req.get_header_value("Authorization"));
    }
    if (options_.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(options_.delay_ms));

    auto body = nlohmann::json::parse(req.body);
    const int n = body.value("n", 1);
    if (index < options_.fail_first) {
      res.status = 500;
      res.set_content("{\"error\":\"overloaded\"}", "application/json");
    } else if (options_.invalid_json) {
      res.set_content(std::string(300, 'x') + "{not json", "application/json");
    } else if (options_.reject_n && body.contains("n") && n > 1) {
      res.status = 400;
      res.set_content("{\"error\":\"n not supported\"}", "application/json");
    } else {
      const auto prompt = body["messages"][0]["content"].get<std::string>();
      nlohmann::json choices = nlohmann::json::array();
      const int count = options_.ignore_n ? 1 : n;
      for (int i = 0; i < count; ++i) {
        choices.push_back({{"index", i},
                           {"message", {{"role", "assistant"}, {"content", options_.reply(prompt, i)}}},
                           {"finish_reason", options_.finish_reason}});
      }
      res.set_content(nlohmann::json{{"choices", choices}}.dump(), "application/json");
    }
    --in_flight_;
  });
  impl_->server.new_task_queue = [] { return new httplib::ThreadPool(32); };
  port_ = impl_->server.bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

StubServer::~StubServer() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

std::string StubServer::base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

std::vector<std::string> StubServer::bodies() const {
  std::lock_guard lock(mu_);
  return bodies_;
}

std::vector<std::string> StubServer::auth_headers() const {
  std::lock_guard lock(mu_);
  return auth_;
}

}  // namespace revr::testing

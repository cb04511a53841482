#pragma once

// In-process chat-completions stub: serves a scripted list of (status, body)
// responses and records every request it saw.

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace testsupport {

struct ScriptedResponse {
    int status = 200;
    std::string body;
};

inline std::string chat_body(const std::string& content) {
    nlohmann::json j;
    j["choices"] = nlohmann::json::array();
    j["choices"].push_back({{"message", {{"role", "assistant"}, {"content", content}}}});
    return j.dump();
}

class StubServer {
public:
    explicit StubServer(std::vector<ScriptedResponse> script) : script_(std::move(script)) {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
            std::lock_guard<std::mutex> lock(mutex_);
            requests_.push_back(req.body);
            auth_headers_.push_back(req.get_header_value("Authorization"));
            const std::size_t i = std::min(served_, script_.size() - 1);
            ++served_;
            res.status = script_[i].status;
            res.set_content(script_[i].body, "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this]() { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer() {
        server_.stop();
        thread_.join();
    }

    int port() const { return port_; }
    std::string endpoint() const {
        return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    }

    std::size_t request_count() {
        std::lock_guard<std::mutex> lock(mutex_);
        return requests_.size();
    }
    std::string request(std::size_t i) {
        std::lock_guard<std::mutex> lock(mutex_);
        return requests_.at(i);
    }
    std::string auth_header(std::size_t i) {
        std::lock_guard<std::mutex> lock(mutex_);
        return auth_headers_.at(i);
    }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::vector<ScriptedResponse> script_;
    std::size_t served_ = 0;
    std::vector<std::string> requests_;
    std::vector<std::string> auth_headers_;
    std::mutex mutex_;
};

} // namespace testsupport

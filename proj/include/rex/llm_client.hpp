#pragma once

#include "rex/core.hpp"
#include "rex/errors.hpp"
#include "rex/oracle.hpp"
#include "rex/prompts.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace rex {

/// Connection and sampling settings for a chat-completions endpoint, plus
/// the prompt templates the live oracle renders.
struct LLMOracleConfig {
    std::string endpoint = "http://127.0.0.1:8080/v1/chat/completions";
    std::string api_key;
    std::string model = "gpt-4";
    double temperature = 1.0;
    int max_retries = 3;
    std::chrono::milliseconds timeout{30000};
    std::chrono::milliseconds backoff_base{250};
    PromptTemplate initial_template;
    PromptTemplate refine_template;

    void validate() const {
        if (!(temperature >= 0.0)) throw ConfigError("llm: temperature must be >= 0");
        if (max_retries < 0) throw ConfigError("llm: max_retries must be >= 0");
    }
};

/// Environment variables override the configured endpoint/key, so secrets
/// stay out of config files.
inline void apply_env_overrides(LLMOracleConfig& cfg) {
    if (const char* ep = std::getenv("REX_LLM_ENDPOINT")) cfg.endpoint = ep;
    if (const char* key = std::getenv("REX_LLM_API_KEY")) cfg.api_key = key;
    if (const char* model = std::getenv("REX_LLM_MODEL")) cfg.model = model;
}

struct CallStats {
    int retries = 0;
    int http_status = 0;
};

/// First fenced code block if present (language tag stripped), else the
/// whole text.
inline std::string extract_code_block(const std::string& text) {
    const std::size_t open = text.find("```");
    if (open == std::string::npos) return text;
    std::size_t body = text.find('\n', open + 3);
    if (body == std::string::npos) return text;
    ++body;
    std::size_t close = text.find("```", body);
    if (close == std::string::npos) close = text.size();
    // Drop the newline that precedes the closing fence.
    std::size_t end = close;
    if (end > body && text[end - 1] == '\n') --end;
    return text.substr(body, end - body);
}

namespace detail {

struct SplitUrl {
    std::string base; // scheme://host[:port]
    std::string path; // /v1/chat/completions
};

inline SplitUrl split_url(const std::string& url) {
    const std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) {
        throw ConfigError("llm: endpoint must include a scheme: " + url);
    }
    const std::size_t slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return SplitUrl{url, "/"};
    return SplitUrl{url.substr(0, slash), url.substr(slash)};
}

} // namespace detail

/// POST a chat-completions request and return the extracted program text.
/// Transport failures and 5xx responses retry with exponential backoff up to
/// cfg.max_retries; 4xx is a configuration error and is not retried; a body
/// without the expected fields is a protocol error.
inline std::string chat_complete(const LLMOracleConfig& cfg, const std::vector<Message>& messages,
                                 CallStats* stats = nullptr) {
    cfg.validate();
    const auto url = detail::split_url(cfg.endpoint);

    nlohmann::json body;
    body["model"] = cfg.model;
    body["temperature"] = cfg.temperature;
    body["messages"] = nlohmann::json::array();
    for (const Message& m : messages) {
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    }
    const std::string payload = body.dump();

    httplib::Client client(url.base);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout));

    httplib::Headers headers;
    if (!cfg.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + cfg.api_key);
    }

    std::string last_failure = "no attempt made";
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(cfg.backoff_base * (1LL << (attempt - 1)));
            if (stats) stats->retries = attempt;
        }
        auto res = client.Post(url.path, headers, payload, "application/json");
        if (!res) {
            last_failure = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (stats) stats->http_status = res->status;
        if (res->status >= 200 && res->status < 300) {
            nlohmann::json parsed;
            try {
                parsed = nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                throw ProtocolError(std::string("llm: response is not JSON: ") + e.what());
            }
            if (!parsed.contains("choices") || !parsed["choices"].is_array() ||
                parsed["choices"].empty()) {
                throw ProtocolError("llm: response has no choices");
            }
            const auto& first = parsed["choices"][0];
            if (!first.contains("message") || !first["message"].contains("content") ||
                !first["message"]["content"].is_string()) {
                throw ProtocolError("llm: choice has no message content");
            }
            return extract_code_block(first["message"]["content"].get<std::string>());
        }
        if (res->status >= 400 && res->status < 500) {
            throw ConfigError("llm: request rejected with HTTP " + std::to_string(res->status) +
                              ": " + res->body);
        }
        if (res->status >= 500) {
            last_failure = "HTTP " + std::to_string(res->status);
            continue;
        }
        throw ProtocolError("llm: unexpected HTTP status " + std::to_string(res->status));
    }
    throw TransportError("llm: retries exhausted (" + std::to_string(cfg.max_retries + 1) +
                         " attempts); last failure: " + last_failure);
}

/// Live refinement oracle: renders the appropriate prompt, calls the
/// endpoint, and returns the extracted program text. Counterexample feedback
/// embeds the failing constraint and the overall pass count.
class LlmOracle final : public RefinementOracle {
public:
    LlmOracle(LLMOracleConfig cfg, std::string problem_description)
        : cfg_(std::move(cfg)), problem_(std::move(problem_description)) {
        cfg_.validate();
    }

    const CallStats& last_call() const { return last_; }

    std::string refine(const ProgramNode& parent, const std::optional<Conjunct>& counterexample,
                       const Specification& spec, RandomStream&) override {
        std::vector<Message> messages;
        if (parent.is_root()) {
            messages = build_initial_prompt(problem_, cfg_.initial_template);
        } else {
            if (!counterexample.has_value()) {
                throw Error("llm oracle: non-root refinement needs a counterexample");
            }
            messages = build_refine_prompt(problem_, parent.content,
                                           feedback_text(parent, *counterexample, spec),
                                           cfg_.refine_template);
        }
        last_ = CallStats{};
        return chat_complete(cfg_, messages, &last_);
    }

    static std::string feedback_text(const ProgramNode& parent, const Conjunct& counterexample,
                                     const Specification& spec) {
        const int passed = parent.pass_vector.count_passed();
        return "The failure is due to unsatisfied constraint " +
               std::to_string(counterexample.id) + ": " + counterexample.payload +
               "\nOverall evaluation: " + std::to_string(passed) + " out of " +
               std::to_string(spec.size()) + " test cases passed";
    }

private:
    LLMOracleConfig cfg_;
    std::string problem_;
    CallStats last_;
};

} // namespace rex

#include "codeplan/editors.hpp"
#include "codeplan/errors.hpp"

#include <httplib.h>

#include <cstdlib>
#include <regex>
#include <thread>

namespace codeplan {

namespace {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Url split_url(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw ConfigError("editor endpoint is not an http(s) URL: " + url);
    return {m[1], m[2].matched ? std::string(m[2]) : "/"};
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

RemoteEditorConfig RemoteEditorConfig::from_json(const nlohmann::json& j) {
    RemoteEditorConfig c;
    try {
        c.endpoint = j.value("endpoint", "");
        c.model = j.value("model", "");
        c.api_key_env = j.value("api_key_env", "");
        c.timeout = std::chrono::milliseconds(static_cast<long>(j.value("timeout_seconds", 60.0) * 1000));
        c.retries = j.value("retries", 3);
        c.backoff = std::chrono::milliseconds(j.value("backoff_ms", 500));
        c.temperature = j.value("temperature", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("editor config: ") + e.what());
    }
    if (j.contains("api_key")) throw ConfigError("editor config: put the key in an environment variable (api_key_env)");
    if (c.endpoint.empty()) throw ConfigError("editor config: endpoint is required for the remote editor");
    if (c.retries < 0) throw ConfigError("editor config: retries must be >= 0");
    return c;
}

EditResponse parse_reply(const std::string& reply) {
    const std::string t = trim(reply);
    if (t == "No changes.") return EditResponse::no_changes();
    const std::size_t open = reply.find("```");
    if (open != std::string::npos) {
        const std::size_t body = reply.find('\n', open);
        if (body != std::string::npos) {
            const std::size_t close = reply.find("\n```", body);
            if (close != std::string::npos) return {reply.substr(body + 1, close - body - 1)};
        }
    }
    throw EditorError("reply has neither a fenced code block nor \"No changes.\"");
}

EditResponse RemoteEditor::edit(const EditRequest& req) {
    const Url url = split_url(config_.endpoint);
    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (!key) throw EditorError("environment variable " + config_.api_key_env + " is not set");
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    const nlohmann::json body = {{"model", config_.model},
                                 {"temperature", config_.temperature},
                                 {"messages", {{{"role", "user"}, {"content", req.prompt}}}}};
    const std::string payload = body.dump();

    std::string last_error;
    auto delay = config_.backoff;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(delay);
            delay *= 2;
        }
        httplib::Client cli(url.origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
        cli.set_connection_timeout(secs.count(), usecs.count());
        cli.set_read_timeout(secs.count(), usecs.count());
        cli.set_write_timeout(secs.count(), usecs.count());
        auto res = cli.Post(url.path, headers, payload, "application/json");
        if (!res) {
            last_error = "request failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403)
            throw EditorError("editor endpoint rejected credentials (HTTP " + std::to_string(res->status) + ")");
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) throw EditorError("editor endpoint returned HTTP " + std::to_string(res->status));
        std::string content;
        try {
            content = nlohmann::json::parse(res->body).at("choices").at(0).at("message").at("content");
        } catch (const nlohmann::json::exception& e) {
            throw EditorError(std::string("malformed editor reply: ") + e.what());
        }
        return parse_reply(content);
    }
    throw EditorError("editor endpoint unavailable after " + std::to_string(config_.retries + 1) +
                      " attempts: " + last_error);
}

} // namespace codeplan

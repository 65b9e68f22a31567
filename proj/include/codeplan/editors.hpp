#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "codeplan/syntax.hpp"

namespace codeplan {

struct EditRequest {
    std::string prompt;
    Fragment fragment;         // sketch_text is the code shown in p5
    std::string context_text;  // p2..p4 as rendered in the prompt
    int step = 0;
};

// new_text holds the edited sketch; nullopt is the "No changes." reply.
struct EditResponse {
    std::optional<std::string> new_text;

    static EditResponse no_changes() { return {}; }
};

class Editor {
public:
    virtual ~Editor() = default;
    // Throws EditorError when the backend cannot produce an answer.
    virtual EditResponse edit(const EditRequest& request) = 0;
    virtual std::string name() const = 0;
};

struct RewriteRule {
    std::string match;
    std::string replace;              // ECMAScript format: $1, $&
    std::optional<std::string> block; // regex searched in the subject's qualified name
    std::optional<std::string> requires_context;  // substring that must occur in the context text
    std::regex match_re;
    std::optional<std::regex> block_re;
};

// Regex rewrites over the subject's code, applied in file order.
// {"rules": [{"match", "replace", ["block"], ["requires"]}]}
class RuleEditor : public Editor {
public:
    explicit RuleEditor(std::vector<RewriteRule> rules) : rules_(std::move(rules)) {}
    static RuleEditor from_json(const nlohmann::json& doc);  // ConfigError when malformed

    EditResponse edit(const EditRequest& request) override;
    std::string name() const override { return "rule"; }

private:
    std::vector<RewriteRule> rules_;
};

// Plays back recorded block texts: {"edits": [{"block", "text"}]}. Entries
// for one block are used in order, one per request; then "No changes.".
class ReplayEditor : public Editor {
public:
    static ReplayEditor from_json(const nlohmann::json& doc);

    EditResponse edit(const EditRequest& request) override;
    std::string name() const override { return "replay"; }

private:
    std::map<std::string, std::vector<std::string>> edits_;
    std::map<std::string, std::size_t> used_;
};

struct RemoteEditorConfig {
    std::string endpoint;  // "http://host:port/v1/chat/completions"
    std::string model;
    std::string api_key_env;  // name of the environment variable holding the key
    std::chrono::milliseconds timeout{60000};
    int retries = 3;
    std::chrono::milliseconds backoff{500};  // doubled after every failed attempt
    double temperature = 0.0;

    static RemoteEditorConfig from_json(const nlohmann::json& j);
};

// Chat-completion style HTTP backend.
class RemoteEditor : public Editor {
public:
    explicit RemoteEditor(RemoteEditorConfig config) : config_(std::move(config)) {}

    EditResponse edit(const EditRequest& request) override;
    std::string name() const override { return "remote"; }

private:
    RemoteEditorConfig config_;
};

// Interprets a model reply: the sentinel, or the first fenced code block.
// EditorError when it is neither.
EditResponse parse_reply(const std::string& reply);

} // namespace codeplan

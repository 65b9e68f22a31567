#include "codeplan/editors.hpp"
#include "codeplan/errors.hpp"

namespace codeplan {

namespace {

std::string qualified_name_of(const BlockId& id) {
    const std::size_t k = id.str().rfind("::");
    return k == std::string::npos ? id.str() : id.str().substr(k + 2);
}

std::string kind_of(const BlockId& id) {
    const std::size_t a = id.str().find("::");
    const std::size_t b = id.str().rfind("::");
    return a == b ? "" : id.str().substr(a + 2, b - a - 2);
}

} // namespace

RuleEditor RuleEditor::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array())
        throw ConfigError("rules file: expected {\"rules\": [...]}");
    std::vector<RewriteRule> rules;
    for (std::size_t i = 0; i < doc["rules"].size(); ++i) {
        const auto& r = doc["rules"][i];
        const std::string where = "rules[" + std::to_string(i) + "]";
        if (!r.is_object() || !r.contains("match") || !r["match"].is_string() || !r.contains("replace") ||
            !r["replace"].is_string())
            throw ConfigError(where + ": needs string fields \"match\" and \"replace\"");
        RewriteRule rule;
        rule.match = r["match"];
        rule.replace = r["replace"];
        try {
            rule.match_re = std::regex(rule.match, std::regex::ECMAScript | std::regex::multiline);
            if (r.contains("block")) {
                rule.block = r["block"].get<std::string>();
                rule.block_re = std::regex(*rule.block);
            }
        } catch (const std::regex_error& e) {
            throw ConfigError(where + ": bad regex: " + e.what());
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(where + ": " + e.what());
        }
        if (r.contains("requires")) {
            if (!r["requires"].is_string()) throw ConfigError(where + ": \"requires\" must be a string");
            rule.requires_context = r["requires"].get<std::string>();
        }
        rules.push_back(std::move(rule));
    }
    return RuleEditor(std::move(rules));
}

EditResponse RuleEditor::edit(const EditRequest& req) {
    const Fragment& f = req.fragment;
    // Rewrites touch the subject only, so sibling headers in a class sketch stay put.
    const bool whole = kind_of(f.subject) == "Class" || f.subject_text.empty();
    std::string code = whole ? f.sketch_text : f.subject_text;
    const std::string qn = qualified_name_of(f.subject);
    bool fired = false;
    for (const auto& r : rules_) {
        if (r.block_re && !std::regex_search(qn, *r.block_re)) continue;
        if (r.requires_context && req.context_text.find(*r.requires_context) == std::string::npos) continue;
        if (!std::regex_search(code, r.match_re)) continue;
        code = std::regex_replace(code, r.match_re, r.replace);
        fired = true;
    }
    if (!fired) return EditResponse::no_changes();
    if (whole) return {code};
    std::string sketch = f.sketch_text;
    const std::size_t at = sketch.find(f.subject_text);
    if (at == std::string::npos) return {code};
    sketch.replace(at, f.subject_text.size(), code);
    if (sketch == f.sketch_text) return EditResponse::no_changes();
    return {sketch};
}

ReplayEditor ReplayEditor::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("edits") || !doc["edits"].is_array())
        throw ConfigError("replay file: expected {\"edits\": [...]}");
    ReplayEditor ed;
    for (const auto& e : doc["edits"]) {
        if (!e.is_object() || !e.contains("block") || !e.contains("text") || !e["block"].is_string() ||
            !e["text"].is_string())
            throw ConfigError("replay file: every edit needs string fields \"block\" and \"text\"");
        ed.edits_[e["block"].get<std::string>()].push_back(e["text"].get<std::string>());
    }
    return ed;
}

EditResponse ReplayEditor::edit(const EditRequest& req) {
    const Fragment& f = req.fragment;
    auto it = edits_.find(f.subject.str());
    if (it == edits_.end()) return EditResponse::no_changes();
    std::size_t& k = used_[it->first];
    if (k >= it->second.size()) return EditResponse::no_changes();
    const std::string& text = it->second[k++];
    if (kind_of(f.subject) == "Class") return {text};
    std::string sketch = f.sketch_text;
    const std::size_t at = sketch.find(f.subject_text);
    if (at == std::string::npos) return {text};
    sketch.replace(at, f.subject_text.size(), text);
    return {sketch};
}

} // namespace codeplan

#include "codeplan/errors.hpp"
#include "codeplan/oracle.hpp"
#include "codeplan/seeds.hpp"

#include <algorithm>
#include <map>

namespace codeplan {

namespace {

constexpr const char* kRepairPreamble = "Fix the following problems reported by the checker:";

std::string selector_text(const nlohmann::json& s) {
    if (s.contains("block")) return s.at("block").get<std::string>();
    return s.value("file", std::string("?")) + "::" + s.value("qualified_name", std::string("?"));
}

std::vector<BlockId> resolve(const nlohmann::json& s, const Repository& repo) {
    if (s.contains("block")) {
        BlockId id(s.at("block").get<std::string>());
        return repo.contains(id) ? std::vector<BlockId>{id} : std::vector<BlockId>{};
    }
    const std::string file = s.value("file", std::string());
    const std::string qname = s.value("qualified_name", std::string());
    std::optional<BlockKind> kind;
    if (s.contains("kind")) {
        kind = block_kind_from_string(s.at("kind").get<std::string>());
        if (!kind) throw ConfigError("unknown block kind in seed " + selector_text(s));
    }
    std::vector<BlockId> out;
    const ParsedFile* pf = repo.find_file(file);
    if (!pf) return out;
    for (const auto& b : pf->blocks) {
        if (b.qualified_name != qname || (kind && b.kind != *kind)) continue;
        out.push_back(b.id);
    }
    return out;
}

} // namespace

SeedSet load_seeds(const nlohmann::json& doc, const Repository& repo) {
    SeedSet out;
    out.task = doc.value("task", std::string());
    std::vector<std::string> bad;
    std::map<BlockId, std::size_t> index;
    for (const auto& s : doc.value("seeds", nlohmann::json::array())) {
        const auto ids = resolve(s, repo);
        if (ids.size() != 1) {
            bad.push_back(selector_text(s) + (ids.empty() ? " (no such block)" : " (ambiguous)"));
            continue;
        }
        const std::string instruction = s.value("instruction", std::string());
        if (auto it = index.find(ids.front()); it != index.end()) {
            std::string& merged = out.seeds[it->second].instruction;
            if (!instruction.empty()) merged += (merged.empty() ? "" : "\n") + instruction;
            continue;
        }
        index[ids.front()] = out.seeds.size();
        out.seeds.push_back({ids.front(), instruction});
    }
    if (!bad.empty()) {
        std::string msg = "unresolvable seed selector(s):";
        for (const auto& b : bad) msg += " " + b;
        throw ConfigError(msg);
    }
    return out;
}

std::vector<EditSpecification> diagnostics_to_seeds(const OracleVerdict& verdict, const Repository& repo) {
    std::vector<EditSpecification> out;
    std::map<BlockId, std::size_t> index;
    for (const Diagnostic& d : verdict.diagnostics) {
        const ParsedFile* pf = d.file.empty() ? nullptr : repo.find_file(d.file);
        if (!pf) continue;
        const CodeBlock* best = &pf->blocks.front();
        if (!pf->error) {
            for (const auto& b : pf->blocks) {
                if (b.span.start_line > d.line_start || b.span.end_line < d.line_start) continue;
                if (b.span.end - b.span.start < best->span.end - best->span.start) best = &b;
            }
        }
        const std::string line = "- line " + std::to_string(d.line_start) + ": " + d.message;
        if (auto it = index.find(best->id); it != index.end()) {
            out[it->second].instruction += "\n" + line;
            continue;
        }
        index[best->id] = out.size();
        out.push_back({best->id, std::string(kRepairPreamble) + "\n" + line});
    }
    return out;
}

nlohmann::json to_json(const Diagnostic& d) {
    return {{"file", d.file}, {"line_start", d.line_start}, {"line_end", d.line_end}, {"message", d.message}};
}

nlohmann::json to_json(const OracleVerdict& v) {
    nlohmann::json diags = nlohmann::json::array();
    for (const auto& d : v.diagnostics) diags.push_back(to_json(d));
    return {{"pass", v.pass}, {"diagnostics", diags}};
}

} // namespace codeplan

#include "codeplan/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

namespace codeplan {

namespace {

std::string collapse_ws(std::string_view s) {
    std::string out;
    bool gap = false;
    for (const char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            gap = !out.empty();
            continue;
        }
        if (gap) out += ' ';
        gap = false;
        out += c;
    }
    return out;
}

std::map<std::string, std::string> comparable_blocks(const Repository& r) {
    std::map<std::string, std::string> out;
    for (const CodeBlock* b : r.blocks()) {
        if (b->kind == BlockKind::Module || b->kind == BlockKind::Statement) continue;
        std::string text = b->text;
        if (b->kind == BlockKind::Class && b->node) {
            const std::string& src = r.file(b->file).source.text;
            text = src.substr(b->node->header.start, b->node->header.end - b->node->header.start);
        }
        out[b->id.str()] = collapse_ws(text);
    }
    return out;
}

} // namespace

std::vector<std::string> edited_blocks(const Repository& a, const Repository& b) {
    const auto ba = comparable_blocks(a), bb = comparable_blocks(b);
    std::vector<std::string> out;
    for (const auto& [k, v] : ba) {
        auto it = bb.find(k);
        if (it == bb.end() || it->second != v) out.push_back(k);
    }
    for (const auto& [k, v] : bb)
        if (!ba.count(k)) out.push_back(k);
    std::sort(out.begin(), out.end());
    return out;
}

BlockCounts block_metrics(const Repository& source, const Repository& target, const Repository& predicted) {
    const auto t = edited_blocks(source, target), p = edited_blocks(source, predicted);
    const std::set<std::string> ts(t.begin(), t.end()), ps(p.begin(), p.end());
    BlockCounts c;
    for (const auto& k : ts) (ps.count(k) ? c.matched_blocks : c.missed_blocks).push_back(k);
    for (const auto& k : ps)
        if (!ts.count(k)) c.spurious_blocks.push_back(k);
    c.matched = c.matched_blocks.size();
    c.missed = c.missed_blocks.size();
    c.spurious = c.spurious_blocks.size();
    return c;
}

MetricsReport evaluate(const Repository& source, const Repository& target, const Repository& predicted,
                       Oracle* oracle) {
    MetricsReport r;
    r.blocks = block_metrics(source, target, predicted);
    r.levenshtein = levenshtein_distance(predicted, target);
    r.diff_bleu = diff_bleu(source, target, predicted);
    if (oracle) r.oracle = oracle->check(predicted);
    r.ground_truth_match = r.blocks.missed == 0 && r.blocks.spurious == 0;
    r.valid = r.ground_truth_match && (!r.oracle || r.oracle->pass);
    return r;
}

nlohmann::json to_json(const MetricsReport& r) {
    nlohmann::json j = {{"matched", r.blocks.matched},
                        {"missed", r.blocks.missed},
                        {"spurious", r.blocks.spurious},
                        {"matched_blocks", r.blocks.matched_blocks},
                        {"missed_blocks", r.blocks.missed_blocks},
                        {"spurious_blocks", r.blocks.spurious_blocks},
                        {"levenshtein", r.levenshtein},
                        {"diff_bleu", r.diff_bleu},
                        {"ground_truth_match", r.ground_truth_match},
                        {"valid", r.valid}};
    j["oracle"] = r.oracle ? to_json(*r.oracle) : nlohmann::json(nullptr);
    return j;
}

std::string format_table(const MetricsReport& r, const std::string& label) {
    char row[256];
    std::string s;
    std::snprintf(row, sizeof row, "%-20s %8s %8s %9s %10s %12s %9s\n", "", "Matched", "Missed", "Spurious",
                  "Diff BLEU", "Levenshtein", "Validity");
    s += row;
    std::snprintf(row, sizeof row, "%-20s %8zu %8zu %9zu %10.2f %12zu %9s\n", label.c_str(), r.blocks.matched,
                  r.blocks.missed, r.blocks.spurious, r.diff_bleu, r.levenshtein, r.valid ? "pass" : "fail");
    s += row;
    return s;
}

} // namespace codeplan

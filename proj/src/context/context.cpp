#include "codeplan/context.hpp"

#include <algorithm>
#include <set>

namespace codeplan {

namespace {

constexpr RelationLabel kSpatialOrder[] = {RelationLabel::Calls,     RelationLabel::Uses,
                                           RelationLabel::Instantiates, RelationLabel::Overrides,
                                           RelationLabel::OverriddenBy, RelationLabel::Imports};

std::string indent_block(const std::string& text, std::string_view pad) {
    std::string out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view line(text.data() + pos, (nl == std::string::npos ? text.size() : nl) - pos);
        if (!line.empty()) out += pad;
        out += line;
        if (nl == std::string::npos) break;
        out += '\n';
        pos = nl + 1;
    }
    return out;
}

std::string temporal_section(const TemporalContext& t) {
    std::string s = "Earlier Code Changes (Temporal Context): Edits already applied to the repository:\n";
    if (t.edits.empty()) return s + "(none)\n";
    int k = 0;
    for (const auto& e : t.edits) {
        s += "  Edit " + std::to_string(++k) + ": " + display_name(e.block) + "\n";
        s += "    Before:\n" + indent_block(e.before, "      ") + "\n";
        s += "    After:\n" + indent_block(e.after, "      ") + "\n";
    }
    return s;
}

std::string causes_section(const TemporalContext& t) {
    std::string s = "Causes for Change: This code needs attention because:\n";
    if (t.causes.empty()) return s + "(none)\n";
    for (const auto& c : t.causes) s += "  " + c + "\n";
    return s;
}

std::string spatial_section(const SpatialContext& sp, std::size_t count) {
    std::string s = "Related Code (Spatial Context): Code connected to the block being edited:\n";
    if (count == 0) return s + "(none)\n";
    for (std::size_t i = 0; i < count; ++i) {
        s += "  [" + std::string(to_string(sp[i].relation)) + "] " + display_name(sp[i].block) + "\n";
        s += indent_block(sp[i].sketch, "    ") + "\n";
    }
    return s;
}

std::string assemble(const PromptParts& p, const ContextOptions& o, std::size_t spatial_count) {
    std::string s = "Task Instructions: " + p.task + "\n";
    if (!p.instruction.empty()) s += p.instruction + "\n";
    s += "\n";
    if (o.temporal) s += temporal_section(p.temporal) + "\n" + causes_section(p.temporal) + "\n";
    if (o.spatial) s += spatial_section(p.spatial, spatial_count) + "\n";
    s += "Code to be Changed Next: The current code is:\n" + p.code + "\n\n";
    s += "Rewrite the \"Code to be Changed Next\" so that it carries out the \"Task Instructions\" and stays "
         "consistent with the \"Earlier Code Changes\", \"Causes for Change\" and \"Related Code\". Reply with the "
         "changed code in a single fenced code block. If no changes are needed, output \"No changes.\"\n";
    return s;
}

// Spatial entries that fit under the length cap; the rest is dropped from the end.
std::size_t fitting_count(const PromptParts& p, const ContextOptions& o) {
    std::size_t count = p.spatial.size();
    while (o.max_prompt_chars && o.spatial && count > 0 && assemble(p, o, count).size() > o.max_prompt_chars)
        --count;
    return count;
}

} // namespace

std::string display_name(const BlockId& b) {
    const std::string& s = b.str();
    const std::size_t k = s.rfind("::");
    std::string qn = k == std::string::npos ? s : s.substr(k + 2);
    const std::size_t dot = qn.find('.');
    return dot == std::string::npos ? qn : qn.substr(dot + 1);
}

SpatialContext gather_spatial_context(const BlockId& b, const Repository& repo, const DependencyGraph& D,
                                      std::size_t max_entries) {
    SpatialContext out;
    if (!D.has_node(b)) return out;
    std::set<BlockId> seen{b};
    for (const RelationLabel l : kSpatialOrder) {
        for (const BlockId& n : D.rel(b, l)) {
            if (out.size() >= max_entries) return out;
            if (!repo.contains(n) || !seen.insert(n).second) continue;
            out.push_back({n, l, extract_fragment(n, repo).sketch_text});
        }
    }
    return out;
}

TemporalContext gather_temporal_context(const PlanGraph& G, int node, const Repository&) {
    TemporalContext t;
    for (const int a : G.ancestors(node)) {
        const Obligation& o = G.node(a);
        if (o.before_text && o.after_text) t.edits.push_back({o.block, *o.before_text, *o.after_text});
    }
    const BlockId& subject = G.node(node).block;
    for (const PlanEdge& e : G.incoming(node)) {
        if (e.cyclic) continue;
        t.causes.push_back(display_name(subject) + " is related to " + display_name(G.node(e.src).block) + " by " +
                           std::string(to_string(e.cause)));
    }
    return t;
}

std::string context_text(const PromptParts& p, const ContextOptions& o) {
    std::string s;
    if (o.temporal) s += temporal_section(p.temporal) + causes_section(p.temporal);
    if (o.spatial) s += spatial_section(p.spatial, fitting_count(p, o));
    return s;
}

std::string make_prompt(const PromptParts& p, const ContextOptions& o) { return assemble(p, o, fitting_count(p, o)); }

} // namespace codeplan

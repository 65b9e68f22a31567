#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "codeplan/depgraph.hpp"
#include "codeplan/plangraph.hpp"
#include "codeplan/syntax.hpp"

namespace codeplan {

struct SpatialEntry {
    BlockId block;
    RelationLabel relation = RelationLabel::Calls;  // how the subject reaches block
    std::string sketch;
};

using SpatialContext = std::vector<SpatialEntry>;

struct TemporalEdit {
    BlockId block;
    std::string before;
    std::string after;
};

struct TemporalContext {
    std::vector<TemporalEdit> edits;  // earliest first
    std::vector<std::string> causes;  // one line each
};

struct ContextOptions {
    bool temporal = true;
    bool spatial = true;
    std::size_t max_spatial = 8;
    std::size_t max_prompt_chars = 0;  // 0: no cap
};

// Callees, used fields, instantiated classes, override partners and imports
// of b, in that priority, each once, at most max_entries.
SpatialContext gather_spatial_context(const BlockId& b, const Repository& repo, const DependencyGraph& D,
                                      std::size_t max_entries = 8);

// Edits of the node's plan ancestors plus one sentence per incoming edge.
TemporalContext gather_temporal_context(const PlanGraph& G, int node, const Repository& repo);

// "process" for "process.process", "Complex.__init__" for "complexlib.Complex.__init__".
std::string display_name(const BlockId& b);

struct PromptParts {
    std::string task;         // p1
    std::string instruction;  // appended to p1 when non-empty
    TemporalContext temporal; // p2 and p3
    SpatialContext spatial;   // p4
    std::string code;         // p5, the sketch
};

std::string make_prompt(const PromptParts& parts, const ContextOptions& options);

// The p2..p4 portion of a prompt; what a context-aware editor may consult.
std::string context_text(const PromptParts& parts, const ContextOptions& options);

inline constexpr std::string_view kNoChanges = "No changes.";

} // namespace codeplan

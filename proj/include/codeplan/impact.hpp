#pragma once

#include <compare>
#include <set>
#include <vector>

#include <json.hpp>

#include "codeplan/change.hpp"
#include "codeplan/depgraph.hpp"

namespace codeplan {

// A block that may need a follow-up edit, with the relation that links it
// to the changed element.
struct AffectedBlock {
    BlockId block;
    RelationLabel cause = RelationLabel::CalledBy;

    auto operator<=>(const AffectedBlock&) const = default;
};

nlohmann::json to_json(const AffectedBlock& a);

// May-impact of the changes of one merge on block b. D is the graph before
// the merge, D_after the updated one. The edited block itself and blocks
// that no longer exist are never reported.
std::set<AffectedBlock> get_affected_blocks(const std::vector<AtomicChange>& changes, const BlockId& b,
                                            const DependencyGraph& D, const DependencyGraph& D_after);

} // namespace codeplan

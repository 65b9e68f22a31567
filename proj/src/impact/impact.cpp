#include "codeplan/impact.hpp"

namespace codeplan {

namespace {

using L = RelationLabel;

std::set<BlockId> rel_or_empty(const DependencyGraph& g, const BlockId& x, RelationLabel l) {
    return g.has_node(x) ? g.rel(x, l) : std::set<BlockId>{};
}

// Class owning a member; empty when the member is top-level or unknown.
BlockId owner_class(const DependencyGraph& g, const BlockId& member, BlockKind kind) {
    if (!g.has_node(member)) return {};
    const auto up = g.rel(member, kind == BlockKind::Constructor ? L::Construct : L::ChildOf);
    for (const auto& p : up)
        if (p.str().find("::Class::") != std::string::npos) return p;
    return {};
}

BlockKind kind_of(const BlockId& id) {
    const std::string& s = id.str();
    const std::size_t a = s.find("::");
    const std::size_t b = s.find("::", a + 2);
    if (a == std::string::npos || b == std::string::npos) return BlockKind::Module;
    return block_kind_from_string(s.substr(a + 2, b - a - 2)).value_or(BlockKind::Module);
}

} // namespace

nlohmann::json to_json(const AffectedBlock& a) {
    return {{"block", a.block.str()}, {"cause", to_string(a.cause)}};
}

std::set<AffectedBlock> get_affected_blocks(const std::vector<AtomicChange>& changes, const BlockId& b,
                                            const DependencyGraph& D, const DependencyGraph& D_after) {
    std::set<AffectedBlock> out;
    auto add = [&](const DependencyGraph& g, const BlockId& x, RelationLabel l) {
        if (x.empty()) return;
        for (const auto& y : rel_or_empty(g, x, l)) out.insert({y, l});
    };
    auto hierarchy = [&](const DependencyGraph& g, const BlockId& c) {
        add(g, c, L::BaseClassOf);
        add(g, c, L::DerivedClassOf);
    };

    for (const AtomicChange& ch : changes) {
        const BlockId& x = ch.subject;
        const BlockKind k = kind_of(x);
        // Additions only exist after the merge; everything else is looked up before it.
        const BlockId c = k == BlockKind::Class ? x : owner_class(is_addition(ch.label) ? D_after : D, x, k);
        switch (ch.label) {
        case ChangeLabel::MMB:
            if (ch.escaping.value_or(true)) add(D, x, L::CalledBy);
            break;
        case ChangeLabel::MMS:
            add(D, x, L::CalledBy);
            add(D, x, L::Overrides);
            add(D, x, L::OverriddenBy);
            add(D_after, x, L::Overrides);
            add(D_after, x, L::OverriddenBy);
            break;
        case ChangeLabel::MF:
        case ChangeLabel::DF:
            add(D, x, L::UsedBy);
            add(D, c, L::ConstructedBy);
            hierarchy(D, c);
            break;
        case ChangeLabel::MC:
            add(D, c, L::InstantiatedBy);
            hierarchy(D, c);
            hierarchy(D_after, c);
            break;
        case ChangeLabel::MCC:
        case ChangeLabel::ACC:
        case ChangeLabel::DC:
        case ChangeLabel::DCC:
            add(D, c, L::InstantiatedBy);
            hierarchy(D, c);
            break;
        case ChangeLabel::MI:
        case ChangeLabel::DI:
            add(D, x, L::ImportedBy);
            break;
        case ChangeLabel::AM:
            hierarchy(D, c);
            add(D_after, x, L::CalledBy);
            break;
        case ChangeLabel::AF:
            add(D, c, L::ConstructedBy);
            hierarchy(D, c);
            break;
        case ChangeLabel::AC:
        case ChangeLabel::AI:
            break;
        case ChangeLabel::DM:
            add(D, x, L::CalledBy);
            add(D, x, L::Overrides);
            add(D, x, L::OverriddenBy);
            break;
        }
    }

    for (auto it = out.begin(); it != out.end();)
        it = (it->block == b || !D_after.has_node(it->block)) ? out.erase(it) : std::next(it);
    return out;
}

} // namespace codeplan

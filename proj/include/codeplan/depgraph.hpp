#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "codeplan/syntax.hpp"

namespace codeplan {

// Direction: b is in rel(a, l) when the edge (a, l, b) exists.
//   rel(parent, ParentOf)        = children      rel(class, ConstructedBy) = {constructor}
//   rel(user, Imports)           = import blocks rel(import, ImportedBy)   = users
//   rel(derived, BaseClassOf)    = {base}        rel(base, DerivedClassOf) = subclasses
//   rel(overrider, Overrides)    = {overridden}  rel(overridden, OverriddenBy) = overriders
//   rel(caller, Calls)           = callees       rel(callee, CalledBy)     = callers
//   rel(user, Instantiates)      = classes       rel(class, InstantiatedBy) = users
//   rel(user, Uses)              = fields        rel(field, UsedBy)        = users
enum class RelationLabel {
    ParentOf,
    ChildOf,
    Construct,
    ConstructedBy,
    Imports,
    ImportedBy,
    BaseClassOf,
    DerivedClassOf,
    Overrides,
    OverriddenBy,
    Calls,
    CalledBy,
    Instantiates,
    InstantiatedBy,
    Uses,
    UsedBy,
};

inline constexpr int kRelationLabelCount = 16;

RelationLabel inverse(RelationLabel l);
std::string_view to_string(RelationLabel l);
std::optional<RelationLabel> relation_from_string(std::string_view s);
bool is_structural(RelationLabel l);

struct Edge {
    BlockId src;
    RelationLabel label = RelationLabel::ParentOf;
    BlockId dst;

    auto operator<=>(const Edge&) const = default;
    bool operator==(const Edge&) const = default;
};

class SymbolIndex;
struct BlockAnalysis;

// Labeled multigraph over blocks. Every edge is stored together with its
// inverse. Graphs built by construct_dependency_graph also carry the
// per-block analysis results needed for incremental updates; graphs loaded
// from JSON support queries only.
class DependencyGraph {
public:
    DependencyGraph();
    DependencyGraph(const DependencyGraph&);
    DependencyGraph(DependencyGraph&&) noexcept;
    DependencyGraph& operator=(const DependencyGraph&);
    DependencyGraph& operator=(DependencyGraph&&) noexcept;
    ~DependencyGraph();

    bool has_node(const BlockId& b) const { return nodes_.count(b) > 0; }
    const std::set<BlockId>& nodes() const { return nodes_; }

    // Neighbors of b under l. Throws NotFoundError for unknown b.
    std::set<BlockId> rel(const BlockId& b, RelationLabel l) const;
    bool has_edge(const BlockId& src, RelationLabel l, const BlockId& dst) const;

    // All stored edges, inverses included, in sorted order.
    std::vector<Edge> edges() const;
    std::size_t edge_count() const { return edge_count_; }

    void add_node(const BlockId& b);
    void remove_node(const BlockId& b);
    void add_edge(const BlockId& src, RelationLabel l, const BlockId& dst);
    void remove_edge(const BlockId& src, RelationLabel l, const BlockId& dst);

    // Nodes and edges only; analysis state is ignored.
    bool same_edges(const DependencyGraph& other) const;

    nlohmann::json to_json() const;
    static DependencyGraph from_json(const nlohmann::json& j);

    // Resolution warnings collected while building (unresolved names etc.).
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    friend DependencyGraph construct_dependency_graph(const Repository&);
    friend DependencyGraph construct_dependency_graph_serial(const Repository&);
    friend struct GraphBuilder;

    std::set<BlockId> nodes_;
    std::map<BlockId, std::map<RelationLabel, std::set<BlockId>>> adj_;
    std::size_t edge_count_ = 0;
    std::vector<std::string> warnings_;

    struct State;
    std::shared_ptr<const State> state_;
};

// Parallel per-block analysis (OpenMP) with a deterministic merge.
DependencyGraph construct_dependency_graph(const Repository& repo);
// Reference implementation: same result, one block at a time.
DependencyGraph construct_dependency_graph_serial(const Repository& repo);

} // namespace codeplan

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "codeplan/depgraph.hpp"
#include "codeplan/seeds.hpp"

namespace codeplan {

enum class ObligationStatus { Pending, Completed, Failed };

std::string_view to_string(ObligationStatus s);

struct Obligation {
    int id = 0;
    BlockId block;
    std::string instruction;  // empty for derived obligations
    ObligationStatus status = ObligationStatus::Pending;
    int seq = 0;              // enqueue order; scheduling is FIFO on it
    int generation = 1;       // how many nodes this block has had so far
    bool root = false;
    // The edit that discharged the obligation, for later temporal context.
    std::optional<std::string> before_text;
    std::optional<std::string> after_text;
};

struct PlanEdge {
    int src = 0;
    int dst = 0;
    RelationLabel cause = RelationLabel::CalledBy;
    bool cyclic = false;  // kept for the record, ignored when walking paths
};

class PlanGraph {
public:
    explicit PlanGraph(int generation_cap = 3) : generation_cap_(generation_cap) {}

    // Adds a Pending root; a block that already has a Pending node gets the
    // instruction appended instead. Returns the node id.
    int add_root(const BlockId& block, const std::string& instruction);
    void add_roots(const std::vector<EditSpecification>& seeds);

    // The Pending node of block if there is one, else a new node. nullopt
    // when the block already used up its generations.
    std::optional<int> select_or_add_node(const BlockId& block);

    void add_edge(int from, int to, RelationLabel cause);
    void mark_completed(int id);  // idempotent
    void mark_failed(int id);

    std::optional<int> next_pending() const;
    bool has_pending() const { return next_pending().has_value(); }

    const Obligation& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    Obligation& node(int id) { return nodes_.at(static_cast<std::size_t>(id)); }
    const std::vector<Obligation>& nodes() const { return nodes_; }
    const std::vector<PlanEdge>& edges() const { return edges_; }
    std::vector<PlanEdge> incoming(int id) const;

    // Nodes with a path to id over non-cyclic edges, in seq order.
    std::vector<int> ancestors(int id) const;

    nlohmann::json to_json() const;

private:
    bool reaches(int from, int to) const;
    int make_node(const BlockId& block, const std::string& instruction, bool root);

    int generation_cap_;
    int next_seq_ = 0;
    std::vector<Obligation> nodes_;
    std::vector<PlanEdge> edges_;
};

} // namespace codeplan

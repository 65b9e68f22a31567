#include "codeplan/plangraph.hpp"

#include <algorithm>
#include <set>

namespace codeplan {

std::string_view to_string(ObligationStatus s) {
    switch (s) {
    case ObligationStatus::Pending: return "pending";
    case ObligationStatus::Completed: return "completed";
    case ObligationStatus::Failed: return "failed";
    }
    return "?";
}

int PlanGraph::make_node(const BlockId& block, const std::string& instruction, bool root) {
    Obligation o;
    o.id = static_cast<int>(nodes_.size());
    o.block = block;
    o.instruction = instruction;
    o.seq = next_seq_++;
    o.root = root;
    for (const auto& n : nodes_)
        if (n.block == block) o.generation = std::max(o.generation, n.generation + 1);
    nodes_.push_back(std::move(o));
    return nodes_.back().id;
}

int PlanGraph::add_root(const BlockId& block, const std::string& instruction) {
    for (auto& n : nodes_) {
        if (n.block == block && n.status == ObligationStatus::Pending) {
            if (!instruction.empty()) n.instruction += (n.instruction.empty() ? "" : "\n") + instruction;
            return n.id;
        }
    }
    return make_node(block, instruction, true);
}

void PlanGraph::add_roots(const std::vector<EditSpecification>& seeds) {
    for (const auto& s : seeds) add_root(s.block, s.instruction);
}

std::optional<int> PlanGraph::select_or_add_node(const BlockId& block) {
    int generations = 0;
    for (const auto& n : nodes_) {
        if (n.block != block) continue;
        if (n.status == ObligationStatus::Pending) return n.id;
        generations = std::max(generations, n.generation);
    }
    if (generations >= generation_cap_) return std::nullopt;
    return make_node(block, "", false);
}

bool PlanGraph::reaches(int from, int to) const {
    std::vector<int> stack{from};
    std::set<int> seen;
    while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        if (x == to) return true;
        if (!seen.insert(x).second) continue;
        for (const auto& e : edges_)
            if (e.src == x && !e.cyclic) stack.push_back(e.dst);
    }
    return false;
}

void PlanGraph::add_edge(int from, int to, RelationLabel cause) {
    for (const auto& e : edges_)
        if (e.src == from && e.dst == to && e.cause == cause) return;
    edges_.push_back({from, to, cause, from == to || reaches(to, from)});
}

void PlanGraph::mark_completed(int id) {
    Obligation& o = node(id);
    if (o.status == ObligationStatus::Pending) o.status = ObligationStatus::Completed;
}

void PlanGraph::mark_failed(int id) {
    Obligation& o = node(id);
    if (o.status == ObligationStatus::Pending) o.status = ObligationStatus::Failed;
}

std::optional<int> PlanGraph::next_pending() const {
    std::optional<int> best;
    for (const auto& n : nodes_)
        if (n.status == ObligationStatus::Pending && (!best || n.seq < node(*best).seq)) best = n.id;
    return best;
}

std::vector<PlanEdge> PlanGraph::incoming(int id) const {
    std::vector<PlanEdge> out;
    for (const auto& e : edges_)
        if (e.dst == id) out.push_back(e);
    return out;
}

std::vector<int> PlanGraph::ancestors(int id) const {
    std::set<int> seen;
    std::vector<int> stack{id};
    while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        for (const auto& e : edges_) {
            if (e.dst != x || e.cyclic || !seen.insert(e.src).second) continue;
            stack.push_back(e.src);
        }
    }
    seen.erase(id);
    std::vector<int> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end(), [&](int a, int b) { return node(a).seq < node(b).seq; });
    return out;
}

nlohmann::json PlanGraph::to_json() const {
    nlohmann::json ns = nlohmann::json::array(), es = nlohmann::json::array();
    for (const auto& n : nodes_) {
        ns.push_back({{"id", n.id},
                      {"block", n.block.str()},
                      {"status", to_string(n.status)},
                      {"seq", n.seq},
                      {"generation", n.generation},
                      {"root", n.root}});
    }
    for (const auto& e : edges_)
        es.push_back({{"src", e.src}, {"dst", e.dst}, {"cause", to_string(e.cause)}, {"cyclic", e.cyclic}});
    return {{"nodes", ns}, {"edges", es}};
}

} // namespace codeplan

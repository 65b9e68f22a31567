#include "codeplan/analysis.hpp"
#include "codeplan/change.hpp"
#include "codeplan/depgraph.hpp"
#include "codeplan/errors.hpp"

#include <algorithm>

namespace codeplan {

namespace {

constexpr std::string_view kRelationNames[] = {
    "ParentOf", "ChildOf",  "Construct",    "ConstructedBy",  "Imports", "ImportedBy", "BaseClassOf", "DerivedClassOf",
    "Overrides", "OverriddenBy", "Calls", "CalledBy", "Instantiates", "InstantiatedBy", "Uses", "UsedBy"};

} // namespace

RelationLabel inverse(RelationLabel l) {
    const int i = static_cast<int>(l);
    return static_cast<RelationLabel>(i % 2 == 0 ? i + 1 : i - 1);
}

std::string_view to_string(RelationLabel l) { return kRelationNames[static_cast<int>(l)]; }

std::optional<RelationLabel> relation_from_string(std::string_view s) {
    for (int i = 0; i < kRelationLabelCount; ++i)
        if (kRelationNames[i] == s) return static_cast<RelationLabel>(i);
    return std::nullopt;
}

bool is_structural(RelationLabel l) { return static_cast<int>(l) < 4; }

struct DependencyGraph::State {
    std::shared_ptr<const SymbolIndex> index;
    std::map<BlockId, BlockAnalysis> analysis;
    std::map<std::string, std::set<BlockId>> dependents;  // footprint key -> blocks
};

DependencyGraph::DependencyGraph() = default;
DependencyGraph::DependencyGraph(const DependencyGraph&) = default;
DependencyGraph::DependencyGraph(DependencyGraph&&) noexcept = default;
DependencyGraph& DependencyGraph::operator=(const DependencyGraph&) = default;
DependencyGraph& DependencyGraph::operator=(DependencyGraph&&) noexcept = default;
DependencyGraph::~DependencyGraph() = default;

std::set<BlockId> DependencyGraph::rel(const BlockId& b, RelationLabel l) const {
    if (!has_node(b)) throw NotFoundError("block not in dependency graph: " + b.str());
    auto it = adj_.find(b);
    if (it == adj_.end()) return {};
    auto jt = it->second.find(l);
    return jt == it->second.end() ? std::set<BlockId>{} : jt->second;
}

bool DependencyGraph::has_edge(const BlockId& src, RelationLabel l, const BlockId& dst) const {
    auto it = adj_.find(src);
    if (it == adj_.end()) return false;
    auto jt = it->second.find(l);
    return jt != it->second.end() && jt->second.count(dst) > 0;
}

std::vector<Edge> DependencyGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (const auto& [src, by_label] : adj_)
        for (const auto& [l, dsts] : by_label)
            for (const auto& d : dsts) out.push_back(Edge{src, l, d});
    return out;
}

void DependencyGraph::add_node(const BlockId& b) { nodes_.insert(b); }

void DependencyGraph::remove_node(const BlockId& b) {
    if (!nodes_.erase(b)) return;
    auto it = adj_.find(b);
    if (it == adj_.end()) return;
    const auto by_label = it->second;
    for (const auto& [l, dsts] : by_label)
        for (const auto& d : dsts) remove_edge(b, l, d);
    adj_.erase(b);
}

void DependencyGraph::add_edge(const BlockId& src, RelationLabel l, const BlockId& dst) {
    if (!has_node(src) || !has_node(dst)) throw NotFoundError("edge endpoint not in graph: " + src.str() + " -> " + dst.str());
    if (adj_[src][l].insert(dst).second) {
        adj_[dst][inverse(l)].insert(src);
        edge_count_ += 2;
    }
}

void DependencyGraph::remove_edge(const BlockId& src, RelationLabel l, const BlockId& dst) {
    auto erase_one = [&](const BlockId& a, RelationLabel lab, const BlockId& b) {
        auto it = adj_.find(a);
        if (it == adj_.end()) return false;
        auto jt = it->second.find(lab);
        if (jt == it->second.end() || !jt->second.erase(b)) return false;
        if (jt->second.empty()) it->second.erase(jt);
        if (it->second.empty()) adj_.erase(it);
        return true;
    };
    if (erase_one(src, l, dst)) {
        erase_one(dst, inverse(l), src);
        edge_count_ -= 2;
    }
}

bool DependencyGraph::same_edges(const DependencyGraph& other) const {
    return nodes_ == other.nodes_ && adj_ == other.adj_;
}

nlohmann::json DependencyGraph::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : nodes_) nodes.push_back(n.str());
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : this->edges())
        edges.push_back({{"src", e.src.str()}, {"label", to_string(e.label)}, {"dst", e.dst.str()}});
    return {{"nodes", nodes}, {"edges", edges}};
}

DependencyGraph DependencyGraph::from_json(const nlohmann::json& j) {
    DependencyGraph g;
    try {
        for (const auto& n : j.at("nodes")) g.add_node(BlockId(n.get<std::string>()));
        for (const auto& e : j.at("edges")) {
            auto l = relation_from_string(e.at("label").get<std::string>());
            if (!l) throw ConfigError("unknown relation label: " + e.at("label").get<std::string>());
            g.add_edge(BlockId(e.at("src").get<std::string>()), *l, BlockId(e.at("dst").get<std::string>()));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed graph document: ") + ex.what());
    }
    return g;
}

// ---------------------------------------------------------------------------

struct GraphBuilder {
    using State = DependencyGraph::State;

    static void add_structure(DependencyGraph& g, const ParsedFile& pf) {
        for (const auto& b : pf.blocks) g.add_node(b.id);
        for (const auto& b : pf.blocks) {
            if (!b.parent) continue;
            if (b.kind == BlockKind::Constructor) g.add_edge(*b.parent, RelationLabel::ConstructedBy, b.id);
            else g.add_edge(*b.parent, RelationLabel::ParentOf, b.id);
        }
    }

    static void remove_structure(DependencyGraph& g, const ParsedFile& pf) {
        for (const auto& b : pf.blocks) {
            if (!b.parent) continue;
            if (b.kind == BlockKind::Constructor) g.remove_edge(*b.parent, RelationLabel::ConstructedBy, b.id);
            else g.remove_edge(*b.parent, RelationLabel::ParentOf, b.id);
        }
    }

    static void install(DependencyGraph& g, State& st, const BlockId& id, BlockAnalysis a) {
        for (const auto& [l, dst] : a.edges)
            if (g.has_node(dst)) g.add_edge(id, l, dst);
        for (const auto& key : a.footprint) st.dependents[key].insert(id);
        st.analysis[id] = std::move(a);
    }

    static void uninstall(DependencyGraph& g, State& st, const BlockId& id) {
        auto it = st.analysis.find(id);
        if (it == st.analysis.end()) return;
        for (const auto& [l, dst] : it->second.edges) g.remove_edge(id, l, dst);
        for (const auto& key : it->second.footprint) {
            auto d = st.dependents.find(key);
            if (d == st.dependents.end()) continue;
            d->second.erase(id);
            if (d->second.empty()) st.dependents.erase(d);
        }
        st.analysis.erase(it);
    }

    static void collect_warnings(DependencyGraph& g, const State& st) {
        g.warnings_.clear();
        for (const auto& [id, a] : st.analysis)
            for (const auto& f : a.findings)
                if (f.kind == Finding::Kind::UnresolvedName)
                    g.warnings_.push_back(f.file + ":" + std::to_string(f.line) + ": " + f.message);
    }

    static DependencyGraph build(const Repository& repo, bool parallel) {
        DependencyGraph g;
        auto st = std::make_shared<State>();
        st->index = SymbolIndex::build(repo);

        std::vector<const CodeBlock*> blocks;
        for (const auto& [path, pf] : repo.files()) {
            if (!pf->tree) continue;
            add_structure(g, *pf);
            for (const auto& b : pf->blocks)
                if (b.kind != BlockKind::Module) blocks.push_back(&b);
        }

        std::vector<BlockAnalysis> results(blocks.size());
        const long n = static_cast<long>(blocks.size());
        const SymbolIndex& ix = *st->index;
        if (parallel) {
#pragma omp parallel for schedule(dynamic, 4)
            for (long i = 0; i < n; ++i) results[i] = analyze_block(*blocks[i], ix);
        } else {
            for (long i = 0; i < n; ++i) results[i] = analyze_block(*blocks[i], ix);
        }
        for (long i = 0; i < n; ++i) install(g, *st, blocks[i]->id, std::move(results[i]));
        collect_warnings(g, *st);
        g.state_ = std::move(st);
        return g;
    }

    static std::set<BlockId> incident(const DependencyGraph& g, const BlockId& b) {
        std::set<BlockId> out;
        auto it = g.adj_.find(b);
        if (it == g.adj_.end()) return out;
        for (const auto& [l, dsts] : it->second) out.insert(dsts.begin(), dsts.end());
        return out;
    }

    static std::set<BlockId> rel_or_empty(const DependencyGraph& g, const BlockId& b, RelationLabel l) {
        return g.has_node(b) ? g.rel(b, l) : std::set<BlockId>{};
    }

    // Method that an added method C.m overrides, in the post-edit index.
    static std::optional<BlockId> overridden(const SymbolIndex& ix, const Repository& repo, const BlockId& m) {
        const CodeBlock* b = repo.find(m);
        if (!b || !b->parent) return std::nullopt;
        const CodeBlock* c = repo.find(*b->parent);
        if (!c) return std::nullopt;
        std::set<std::string> seen{c->qualified_name};
        for (std::string base = ix.base_of(c->qualified_name); !base.empty() && seen.insert(base).second;
             base = ix.base_of(base)) {
            const ClassInfo* bc = ix.cls(base);
            if (!bc) break;
            if (auto it = bc->methods.find(b->name); it != bc->methods.end())
                if (const FunctionInfo* f = ix.function(it->second)) return f->block;
        }
        return std::nullopt;
    }

    static DependencyGraph update(const DependencyGraph& D, const std::vector<AtomicChange>& changes,
                                  const Repository& before, const Repository& after, const BlockId& subject) {
        if (!D.state_) throw InconsistencyError("dependency graph carries no analysis state; rebuild it from sources");
        for (const auto& c : changes) {
            if (is_addition(c.label)) {
                if (!after.contains(c.subject))
                    throw InconsistencyError(std::string(to_string(c.label)) + " names a block absent after the edit: " +
                                             c.subject.str());
            } else if (!D.has_node(c.subject)) {
                throw InconsistencyError(std::string(to_string(c.label)) + " names a block absent from the graph: " +
                                         c.subject.str());
            }
        }
        (void)subject;

        DependencyGraph G = D;
        auto st = std::make_shared<State>(*D.state_);
        st->index = SymbolIndex::build(after);

        // Declarations whose shape changed anywhere in the repository.
        std::set<std::string> changed_keys;
        {
            const auto& o = D.state_->index->fingerprints();
            const auto& n = st->index->fingerprints();
            auto i = o.begin();
            auto j = n.begin();
            while (i != o.end() || j != n.end()) {
                if (j == n.end() || (i != o.end() && i->first < j->first)) {
                    changed_keys.insert(i->first);
                    ++i;
                } else if (i == o.end() || j->first < i->first) {
                    changed_keys.insert(j->first);
                    ++j;
                } else {
                    if (i->second != j->second) changed_keys.insert(i->first);
                    ++i;
                    ++j;
                }
            }
        }

        // Node delta and structural edges for every file whose text changed.
        std::set<BlockId> removed, added, retext;
        std::set<std::string> paths;
        for (const auto& [p, _] : before.files()) paths.insert(p);
        for (const auto& [p, _] : after.files()) paths.insert(p);
        for (const auto& p : paths) {
            const ParsedFile* ob = before.find_file(p);
            const ParsedFile* nb = after.find_file(p);
            if (ob && nb && ob->source.text == nb->source.text) continue;
            std::map<BlockId, const CodeBlock*> old_blocks, new_blocks;
            if (ob && ob->tree)
                for (const auto& b : ob->blocks) old_blocks[b.id] = &b;
            if (nb && nb->tree)
                for (const auto& b : nb->blocks) new_blocks[b.id] = &b;
            if (ob && ob->tree) remove_structure(G, *ob);
            for (const auto& [id, b] : old_blocks) {
                auto it = new_blocks.find(id);
                if (it == new_blocks.end()) removed.insert(id);
                else if (it->second->text != b->text) retext.insert(id);
            }
            for (const auto& [id, b] : new_blocks)
                if (!old_blocks.count(id)) added.insert(id);
        }
        for (const auto& id : removed) {
            uninstall(G, *st, id);
            G.remove_node(id);
        }
        for (const auto& id : added) G.add_node(id);
        for (const auto& p : paths) {
            const ParsedFile* nb = after.find_file(p);
            const ParsedFile* ob = before.find_file(p);
            if (ob && nb && ob->source.text == nb->source.text) continue;
            if (nb && nb->tree) add_structure(G, *nb);
        }

        // Blocks to re-analyze: the per-label rule sets, then everything the
        // new or changed declarations can reach through recorded lookups.
        std::set<BlockId> redo;
        auto take = [&](const std::set<BlockId>& s) { redo.insert(s.begin(), s.end()); };
        for (const auto& c : changes) {
            const BlockId& x = c.subject;
            switch (c.label) {
            case ChangeLabel::MMB: redo.insert(x); break;
            case ChangeLabel::MMS:
            case ChangeLabel::MF:
            case ChangeLabel::MC:
            case ChangeLabel::MI:
                redo.insert(x);
                take(incident(D, x));
                break;
            case ChangeLabel::MCC: break;
            case ChangeLabel::AM:
                redo.insert(x);
                if (auto o = overridden(*st->index, after, x)) take(rel_or_empty(D, *o, RelationLabel::CalledBy));
                break;
            case ChangeLabel::AF:
            case ChangeLabel::AC:
            case ChangeLabel::ACC:
            case ChangeLabel::AI: redo.insert(x); break;
            case ChangeLabel::DM:
                take(rel_or_empty(D, x, RelationLabel::CalledBy));
                take(rel_or_empty(D, x, RelationLabel::OverriddenBy));
                break;
            case ChangeLabel::DF: take(rel_or_empty(D, x, RelationLabel::UsedBy)); break;
            case ChangeLabel::DC: take(incident(D, x)); break;
            case ChangeLabel::DCC: break;
            case ChangeLabel::DI: take(rel_or_empty(D, x, RelationLabel::ImportedBy)); break;
            }
        }
        take(added);
        take(retext);
        for (const auto& key : changed_keys) {
            auto it = st->dependents.find(key);
            if (it != st->dependents.end()) take(it->second);
        }

        std::vector<const CodeBlock*> work;
        for (const auto& id : redo) {
            if (!G.has_node(id)) continue;
            const CodeBlock* b = after.find(id);
            if (!b || b->kind == BlockKind::Module) continue;
            uninstall(G, *st, id);
            work.push_back(b);
        }
        for (const CodeBlock* b : work) install(G, *st, b->id, analyze_block(*b, *st->index));
        collect_warnings(G, *st);
        G.state_ = std::move(st);
        return G;
    }
};

DependencyGraph construct_dependency_graph(const Repository& repo) { return GraphBuilder::build(repo, true); }

DependencyGraph construct_dependency_graph_serial(const Repository& repo) { return GraphBuilder::build(repo, false); }

DependencyGraph update_dependency_graph(const DependencyGraph& D, const std::vector<AtomicChange>& changes,
                                        const Repository& repo_before, const Repository& repo_after,
                                        const BlockId& subject) {
    return GraphBuilder::update(D, changes, repo_before, repo_after, subject);
}

} // namespace codeplan

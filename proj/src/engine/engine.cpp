#include "codeplan/engine.hpp"
#include "codeplan/change.hpp"
#include "codeplan/errors.hpp"
#include "codeplan/impact.hpp"

#include <openssl/evp.h>

#include <set>

namespace codeplan {

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

std::string RunResult::trace_jsonl() const {
    std::string s;
    for (const auto& r : trace) s += r.dump() + "\n";
    return s;
}

namespace {

struct StepOutcome {
    std::string status;  // completed | no-changes | failed | stale
    std::vector<AtomicChange> changes;
    std::set<AffectedBlock> affected;
    std::string before, after;
};

// State shared by both drivers: the evolving repository and its graph.
class Session {
public:
    Session(const Repository& repo, const SeedSet& seeds, Oracle& oracle, Editor& editor, const RunOptions& options,
            bool propagate)
        : seeds_(seeds), oracle_(oracle), editor_(editor), options_(options), propagate_(propagate) {
        result_.repo = repo;
        result_.plan = PlanGraph(options.generation_cap);
        D_ = construct_dependency_graph(repo);
        for (const auto& s : seeds.seeds) seed_blocks_.insert(s.block);
        budget_ = options.node_budget.value_or(10 * std::max<std::size_t>(repo.block_count(), 1));
    }

    RunResult& result() { return result_; }

    // Runs every Pending node of the plan. Returns false when the budget ran out.
    bool drain(int iteration) {
        PlanGraph& G = result_.plan;
        while (auto id = G.next_pending()) {
            if (executed_ >= budget_) {
                result_.budget_exhausted = true;
                result_.trace.push_back({{"kind", "budget"}, {"iteration", iteration}, {"executed", executed_}});
                return false;
            }
            ++executed_;
            TemporalContext t = gather_temporal_context(G, *id, result_.repo);
            execute(*id, iteration, std::move(t), {});
        }
        return true;
    }

    // One obligation: fragment, context, prompt, editor, merge, classify,
    // graph update, impact. extra_causes feed p3 when there are no plan edges.
    StepOutcome execute(int id, int iteration, TemporalContext temporal, const std::vector<std::string>& extra_causes) {
        PlanGraph& G = result_.plan;
        const int step = ++step_;
        const BlockId block = G.node(id).block;
        nlohmann::json rec = {{"kind", "step"}, {"step", step}, {"iteration", iteration}, {"block", block.str()}};
        nlohmann::json causes = nlohmann::json::array();
        for (const PlanEdge& e : G.incoming(id))
            causes.push_back({{"from", G.node(e.src).block.str()}, {"label", to_string(e.cause)}, {"cyclic", e.cyclic}});
        rec["causes"] = causes;
        rec["editor_backend"] = editor_.name();
        nlohmann::json flags = nlohmann::json::array();

        StepOutcome out;
        auto finish = [&](std::string status) -> StepOutcome {
            out.status = std::move(status);
            if (out.status == "failed") G.mark_failed(id);
            else G.mark_completed(id);
            nlohmann::json labels = nlohmann::json::array(), affected = nlohmann::json::array();
            for (const auto& c : out.changes) labels.push_back(to_string(c.label));
            for (const auto& a : out.affected) affected.push_back(to_json(a));
            rec["change_labels"] = labels;
            rec["affected"] = affected;
            rec["status"] = out.status;
            rec["flags"] = flags;
            if (!rec.contains("prompt_hash")) rec["prompt_hash"] = nullptr;
            result_.trace.push_back(rec);
            return out;
        };

        if (!result_.repo.contains(block)) {
            result_.prompts.emplace_back();
            flags.push_back("stale-block");
            return finish("stale");
        }
        const Fragment frag = extract_fragment(block, result_.repo);

        PromptParts parts;
        parts.task = seeds_.task;
        parts.instruction = G.node(id).instruction;
        parts.temporal = std::move(temporal);
        for (const auto& c : extra_causes) parts.temporal.causes.push_back(c);
        if (options_.context.spatial)
            parts.spatial = gather_spatial_context(block, result_.repo, D_, options_.context.max_spatial);
        parts.code = frag.sketch_text;

        EditRequest req;
        req.prompt = make_prompt(parts, options_.context);
        req.context_text = context_text(parts, options_.context);
        req.fragment = frag;
        req.step = step;
        rec["prompt_hash"] = sha256_hex(req.prompt);
        result_.prompts.push_back(req.prompt);

        EditResponse resp;
        try {
            resp = editor_.edit(req);
        } catch (const EditorError&) {
            try {
                flags.push_back("editor-retry");
                resp = editor_.edit(req);
            } catch (const EditorError& e) {
                rec["error"] = e.what();
                return finish("failed");
            }
        }
        if (!resp.new_text || *resp.new_text == frag.sketch_text) return finish("no-changes");

        MergeResult merged;
        try {
            merged = merge_fragment(*resp.new_text, frag, result_.repo);
            out.changes = classify_changes(frag.sketch_text, merged.after_text, block);
        } catch (const MergeRejected& e) {
            rec["error"] = e.what();
            return finish("failed");
        } catch (const ParseError& e) {
            rec["error"] = e.what();
            return finish("failed");
        }
        DependencyGraph D_after = update_dependency_graph(D_, out.changes, result_.repo, merged.repo, block);
        out.affected = get_affected_blocks(out.changes, block, D_, D_after);

        out.before = frag.subject_text;
        const CodeBlock* now = merged.repo.find(block);
        out.after = now && now->kind != BlockKind::Class ? now->text : merged.after_text;
        G.node(id).before_text = out.before;
        G.node(id).after_text = out.after;
        // The edit may have moved other blocks; earlier records stay as they were.
        if (merged.repo.sources() != result_.repo.sources()) {
            ++result_.edits;
            if (!seed_blocks_.count(block)) ++result_.derived_edits;
        }
        result_.repo = std::move(merged.repo);
        D_ = std::move(D_after);

        if (propagate_) {
            for (const AffectedBlock& a : out.affected) {
                const auto n = G.select_or_add_node(a.block);
                if (!n) {
                    result_.generation_capped = true;
                    flags.push_back("generation-cap:" + a.block.str());
                    continue;
                }
                G.add_edge(id, *n, a.cause);
                if (G.edges().back().src == id && G.edges().back().dst == *n && G.edges().back().cyclic)
                    flags.push_back("cyclic-edge:" + a.block.str());
            }
        }
        return finish("completed");
    }

    OracleVerdict run_oracle(int iteration) {
        OracleVerdict v = oracle_.check(result_.repo);
        nlohmann::json diags = nlohmann::json::array();
        for (const auto& d : v.diagnostics) diags.push_back(to_json(d));
        result_.trace.push_back(
            {{"kind", "oracle"}, {"iteration", iteration}, {"oracle", oracle_.name()}, {"pass", v.pass}, {"diagnostics", diags}});
        result_.final_verdict = v;
        result_.validated = v.pass;
        return v;
    }

    const SeedSet& seeds() const { return seeds_; }

private:
    const SeedSet& seeds_;
    Oracle& oracle_;
    Editor& editor_;
    RunOptions options_;
    bool propagate_;
    RunResult result_;
    DependencyGraph D_;
    std::set<BlockId> seed_blocks_;
    std::size_t budget_ = 0;
    std::size_t executed_ = 0;
    int step_ = 0;
};

} // namespace

RunResult plan_and_execute(const Repository& repo, const SeedSet& seeds, Oracle& oracle, Editor& editor,
                           const RunOptions& options) {
    Session s(repo, seeds, oracle, editor, options, true);
    RunResult& r = s.result();
    r.plan.add_roots(seeds.seeds);
    for (int it = 1; it <= std::max(options.max_iterations, 1); ++it) {
        r.iterations = it;
        if (!s.drain(it)) break;
        const OracleVerdict v = s.run_oracle(it);
        if (v.pass || it == options.max_iterations) break;
        const auto next = diagnostics_to_seeds(v, r.repo);
        if (next.empty()) break;
        r.plan.add_roots(next);
    }
    if (r.budget_exhausted) r.validated = false;
    return std::move(r);
}

RunResult oracle_guided_repair(const Repository& repo, const SeedSet& seeds, Oracle& oracle, Editor& editor,
                               const RunOptions& options) {
    Session s(repo, seeds, oracle, editor, options, false);
    RunResult& r = s.result();
    TemporalContext history;  // the baseline's own earlier edits

    auto run_round = [&](const std::vector<EditSpecification>& specs, int round, bool with_diagnostics) {
        for (const auto& spec : specs) {
            const int id = r.plan.add_root(spec.block, spec.instruction);
            std::vector<std::string> causes;
            if (with_diagnostics) {
                std::size_t pos = spec.instruction.find('\n');
                while (pos != std::string::npos) {
                    const std::size_t nl = spec.instruction.find('\n', pos + 1);
                    std::string line = spec.instruction.substr(pos + 1, nl == std::string::npos ? nl : nl - pos - 1);
                    if (line.rfind("- ", 0) == 0) line.erase(0, 2);
                    causes.push_back(display_name(spec.block) + ": " + line);
                    pos = nl;
                }
            }
            if (r.plan.node(id).status != ObligationStatus::Pending) continue;
            TemporalContext t{history.edits, {}};
            const StepOutcome out = s.execute(id, round, std::move(t), causes);
            if (out.status == "completed") history.edits.push_back({spec.block, out.before, out.after});
        }
    };

    run_round(seeds.seeds, 0, false);
    bool checked = false;
    for (int round = 1; round <= options.max_rounds; ++round) {
        const OracleVerdict v = s.run_oracle(round);
        checked = true;
        if (v.pass) break;
        const auto next = diagnostics_to_seeds(v, r.repo);
        if (next.empty()) break;
        r.iterations = round;
        run_round(next, round, true);
        checked = false;
    }
    if (!checked) s.run_oracle(options.max_rounds + 1);
    return std::move(r);
}

} // namespace codeplan

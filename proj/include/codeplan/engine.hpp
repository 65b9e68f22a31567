#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "codeplan/context.hpp"
#include "codeplan/editors.hpp"
#include "codeplan/oracle.hpp"
#include "codeplan/plangraph.hpp"
#include "codeplan/seeds.hpp"

namespace codeplan {

struct RunOptions {
    ContextOptions context;
    int max_iterations = 3;              // oracle rounds for codeplan
    int max_rounds = 5;                  // repair rounds for the baseline
    int generation_cap = 3;
    std::optional<std::size_t> node_budget;  // default: 10 x initial block count
};

struct RunResult {
    Repository repo;
    std::vector<nlohmann::json> trace;   // one JSON object per line of trace.jsonl
    std::vector<std::string> prompts;    // index = step - 1
    PlanGraph plan;
    int iterations = 0;
    bool validated = false;
    bool budget_exhausted = false;
    bool generation_capped = false;
    OracleVerdict final_verdict;
    int edits = 0;          // steps that changed the repository
    int derived_edits = 0;  // of those, steps on blocks outside the seed set

    std::string trace_jsonl() const;
};

// Plan-and-execute: seeds, impact-driven obligations, then the oracle; its
// diagnostics seed the next iteration.
RunResult plan_and_execute(const Repository& repo, const SeedSet& seeds, Oracle& oracle, Editor& editor,
                           const RunOptions& options = {});

// Reactive baseline: seed edits without propagation, then repair whatever
// the oracle flags, for at most options.max_rounds rounds.
RunResult oracle_guided_repair(const Repository& repo, const SeedSet& seeds, Oracle& oracle, Editor& editor,
                                       const RunOptions& options = {});

std::string sha256_hex(const std::string& data);

} // namespace codeplan

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "codeplan/syntax.hpp"

namespace codeplan {

// One requested edit: a block and what to do with it.
struct EditSpecification {
    BlockId block;
    std::string instruction;
};

struct SeedSet {
    std::string task;  // overall task text, shown to every obligation
    std::vector<EditSpecification> seeds;
};

// Reads {"task": ..., "seeds": [{"file", "qualified_name", ["kind"], "instruction"} | {"block", "instruction"}]}.
// Each selector must name exactly one live block; ConfigError lists the
// selectors that do not.
SeedSet load_seeds(const nlohmann::json& doc, const Repository& repo);

} // namespace codeplan

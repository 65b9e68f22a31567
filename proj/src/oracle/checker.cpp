#include "codeplan/analysis.hpp"
#include "codeplan/oracle.hpp"

#include <algorithm>

namespace codeplan {

OracleVerdict internal_checker(const Repository& repo, bool strict) {
    OracleVerdict v;
    for (const auto& e : repo.parse_errors()) v.diagnostics.push_back({e.file, e.line, e.line, e.message});

    const auto index = SymbolIndex::build(repo);
    const auto blocks = repo.blocks();
    std::vector<std::vector<Finding>> found(blocks.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(blocks.size()); ++i)
        found[static_cast<std::size_t>(i)] = analyze_block(*blocks[static_cast<std::size_t>(i)], *index).findings;

    for (const auto& fs : found) {
        for (const auto& f : fs) {
            if (f.kind == Finding::Kind::OmittedDefault && !strict) continue;
            v.diagnostics.push_back({f.file, f.line, f.line, f.message});
        }
    }
    std::sort(v.diagnostics.begin(), v.diagnostics.end());
    v.diagnostics.erase(std::unique(v.diagnostics.begin(), v.diagnostics.end()), v.diagnostics.end());
    v.pass = v.diagnostics.empty();
    return v;
}

} // namespace codeplan

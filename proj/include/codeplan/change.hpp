#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "codeplan/depgraph.hpp"
#include "codeplan/syntax.hpp"

namespace codeplan {

enum class ChangeLabel { MMB, MMS, MF, MC, MCC, MI, AM, AF, AC, ACC, AI, DM, DF, DC, DCC, DI };

inline constexpr int kChangeLabelCount = 16;

std::string_view to_string(ChangeLabel l);
std::optional<ChangeLabel> change_label_from_string(std::string_view s);
bool is_addition(ChangeLabel l);
bool is_deletion(ChangeLabel l);

struct AtomicChange {
    ChangeLabel label = ChangeLabel::MMB;
    BlockId subject;                   // post-edit id for A*/M*, pre-edit id for D*
    std::optional<std::string> before_text;
    std::optional<std::string> after_text;
    std::optional<bool> escaping;      // MMB only

    bool operator==(const AtomicChange&) const = default;
};

nlohmann::json to_json(const AtomicChange& c);

// Classifies the edit of one fragment region. before/after are the region
// texts (sketch before, edited text after); both are parsed as if they were
// the whole of the subject's file, so a region is always a class or a
// top-level block. Elements are aligned by (kind, qualified name).
// Throws ParseError when either side does not parse.
std::vector<AtomicChange> classify_changes(const std::string& before, const std::string& after,
                                           const BlockId& subject);

// Whether a body-only edit of a function can be observed by its callers.
// Syntactic: locals are alpha-normalized, then the changed statements are
// scanned for returns, raises, receiver or parameter attribute/subscript
// writes, and module-level names.
bool escapes(const std::string& before_def, const std::string& after_def);

// Applies the update rules for the classified changes of one merge. D is
// the graph of repo_before; the result is the graph of repo_after.
// Throws InconsistencyError when a change names a block missing from D
// (modifications, deletions) or from repo_after (additions).
DependencyGraph update_dependency_graph(const DependencyGraph& D, const std::vector<AtomicChange>& changes,
                                        const Repository& repo_before, const Repository& repo_after,
                                        const BlockId& subject);

} // namespace codeplan

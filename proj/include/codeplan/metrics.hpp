#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "codeplan/oracle.hpp"
#include "codeplan/syntax.hpp"

namespace codeplan {

// Character-level edit distance, two-row dynamic program.
std::size_t levenshtein(std::string_view a, std::string_view b);

// Sum over the union of paths; a missing file counts as empty text.
std::size_t levenshtein_distance(const Repository& predicted, const Repository& target);
std::size_t levenshtein_distance_serial(const Repository& predicted, const Repository& target);

struct DiffLine {
    char tag;  // '-' or '+'
    std::string text;

    bool operator==(const DiffLine&) const = default;
};

// Zero-context line diff (Myers): the removed and added lines in order.
std::vector<DiffLine> line_diff(const std::string& a, const std::string& b);
// The same as a unified diff text with @@ hunk headers.
std::string unified_diff(const std::string& a, const std::string& b, const std::string& path);

// Words and single punctuation characters.
std::vector<std::string> bleu_tokens(std::string_view text);

// Corpus BLEU-4 over paired segments with add-one smoothing for n >= 2.
double corpus_bleu(const std::vector<std::vector<std::string>>& references,
                   const std::vector<std::vector<std::string>>& hypotheses);

double diff_bleu(const Repository& source, const Repository& target, const Repository& predicted);
double diff_bleu_serial(const Repository& source, const Repository& target, const Repository& predicted);

struct BlockCounts {
    std::size_t matched = 0;
    std::size_t missed = 0;
    std::size_t spurious = 0;
    std::vector<std::string> matched_blocks, missed_blocks, spurious_blocks;
};

// Blocks keyed by (file, kind, qualified name); Module and Statement blocks
// are not counted. A class compares by its header only.
BlockCounts block_metrics(const Repository& source, const Repository& target, const Repository& predicted);

// Keys of blocks whose whitespace-normalized text differs between a and b,
// or which exist on one side only.
std::vector<std::string> edited_blocks(const Repository& a, const Repository& b);

struct MetricsReport {
    BlockCounts blocks;
    std::size_t levenshtein = 0;
    double diff_bleu = 0.0;
    std::optional<OracleVerdict> oracle;
    bool ground_truth_match = false;  // missed == 0 and spurious == 0
    bool valid = false;               // oracle pass and ground_truth_match
};

MetricsReport evaluate(const Repository& source, const Repository& target, const Repository& predicted,
                       Oracle* oracle);

nlohmann::json to_json(const MetricsReport& r);
// Matched, Missed, Spurious, Diff BLEU, Levenshtein, Validity.
std::string format_table(const MetricsReport& r, const std::string& label = "");

} // namespace codeplan

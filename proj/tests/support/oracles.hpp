#pragma once

// Slow, direct reference computations that the metric kernels are checked
// against.

#include <cstdint>
#include <string>
#include <vector>

#include "codeplan/syntax.hpp"

namespace codeplan::testing {

// Full (n+1)x(m+1) table, filled from the recurrence.
std::size_t reference_levenshtein(const std::string& a, const std::string& b);

// Longest common subsequence of two line lists.
std::size_t reference_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Applies a zero-context unified diff to a; throws std::runtime_error when a
// hunk does not fit.
std::string apply_unified_diff(const std::string& a, const std::string& diff);

// BLEU-4 straight from the definition: clipped n-gram matches per segment,
// pooled, add-one for n >= 2, brevity penalty.
double reference_bleu(const std::vector<std::vector<std::string>>& refs,
                      const std::vector<std::vector<std::string>>& hyps);

struct TripleReport {
    int triples = 0;
    int violations = 0;
    std::string first_violation;
};

// Random (source, target, predicted) triples made by mutating a scenario;
// checks matched + missed == |target-edited| and the other count identities.
TripleReport check_block_metric_identities(int triples, std::uint32_t seed);

std::vector<std::string> lines_of(const std::string& s);

} // namespace codeplan::testing

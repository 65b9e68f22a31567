#include "codeplan/metrics.hpp"

#include <algorithm>
#include <set>

namespace codeplan {

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] != b[j - 1]);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

namespace {

std::vector<std::string> union_paths(const Repository& a, const Repository& b) {
    std::set<std::string> s;
    for (const auto& p : a.paths()) s.insert(p);
    for (const auto& p : b.paths()) s.insert(p);
    return {s.begin(), s.end()};
}

std::string text_or_empty(const Repository& r, const std::string& path) {
    const ParsedFile* f = r.find_file(path);
    return f ? f->source.text : std::string();
}

} // namespace

std::size_t levenshtein_distance(const Repository& predicted, const Repository& target) {
    const auto paths = union_paths(predicted, target);
    std::size_t total = 0;
    const long n = static_cast<long>(paths.size());
#pragma omp parallel for reduction(+ : total) schedule(dynamic)
    for (long i = 0; i < n; ++i)
        total += levenshtein(text_or_empty(predicted, paths[i]), text_or_empty(target, paths[i]));
    return total;
}

std::size_t levenshtein_distance_serial(const Repository& predicted, const Repository& target) {
    std::size_t total = 0;
    for (const auto& p : union_paths(predicted, target))
        total += levenshtein(text_or_empty(predicted, p), text_or_empty(target, p));
    return total;
}

} // namespace codeplan

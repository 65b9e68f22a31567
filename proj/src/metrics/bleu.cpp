#include "codeplan/metrics.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <set>

namespace codeplan {

std::vector<std::string> bleu_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) out.push_back(std::move(word));
        word.clear();
    };
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c == '_') {
            word += ch;
        } else {
            flush();
            if (!std::isspace(c)) out.emplace_back(1, ch);
        }
    }
    flush();
    return out;
}

namespace {

using Counts = std::map<std::vector<std::string>, int>;

Counts ngrams(const std::vector<std::string>& t, std::size_t n) {
    Counts c;
    for (std::size_t i = 0; i + n <= t.size(); ++i) ++c[std::vector<std::string>(t.begin() + i, t.begin() + i + n)];
    return c;
}

// Segment tokens of a file's diff: each changed line contributes its tag and its tokens.
std::vector<std::string> diff_tokens(const std::string& a, const std::string& b) {
    std::vector<std::string> out;
    for (const auto& d : line_diff(a, b)) {
        out.emplace_back(1, d.tag);
        for (auto& t : bleu_tokens(d.text)) out.push_back(std::move(t));
    }
    return out;
}

struct Segments {
    std::vector<std::vector<std::string>> refs, hyps;
};

std::vector<std::string> all_paths(const Repository& s, const Repository& t, const Repository& p) {
    std::set<std::string> u;
    for (const Repository* r : {&s, &t, &p})
        for (const auto& x : r->paths()) u.insert(x);
    return {u.begin(), u.end()};
}

std::string text_of(const Repository& r, const std::string& path) {
    const ParsedFile* f = r.find_file(path);
    return f ? f->source.text : std::string();
}

double score(const Segments& seg) {
    std::vector<std::vector<std::string>> refs, hyps;
    for (std::size_t i = 0; i < seg.refs.size(); ++i) {
        if (seg.refs[i].empty() && seg.hyps[i].empty()) continue;
        refs.push_back(seg.refs[i]);
        hyps.push_back(seg.hyps[i]);
    }
    if (refs.empty()) return 1.0;
    return corpus_bleu(refs, hyps);
}

} // namespace

double corpus_bleu(const std::vector<std::vector<std::string>>& references,
                   const std::vector<std::vector<std::string>>& hypotheses) {
    std::size_t ref_len = 0, hyp_len = 0;
    long match[5] = {0, 0, 0, 0, 0}, total[5] = {0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < references.size(); ++i) {
        const auto& r = references[i];
        const auto& h = hypotheses.at(i);
        ref_len += r.size();
        hyp_len += h.size();
        for (std::size_t n = 1; n <= 4; ++n) {
            const Counts rc = ngrams(r, n), hc = ngrams(h, n);
            for (const auto& [g, c] : hc) {
                total[n] += c;
                const auto it = rc.find(g);
                if (it != rc.end()) match[n] += std::min(c, it->second);
            }
        }
    }
    if (hyp_len == 0 || match[1] == 0) return 0.0;
    double log_p = 0.0;
    for (int n = 1; n <= 4; ++n) {
        const double p = n == 1 ? static_cast<double>(match[1]) / static_cast<double>(total[1])
                                : (match[n] + 1.0) / (total[n] + 1.0);
        log_p += std::log(p) / 4.0;
    }
    const double bp =
        hyp_len >= ref_len ? 1.0 : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
    return bp * std::exp(log_p);
}

double diff_bleu(const Repository& source, const Repository& target, const Repository& predicted) {
    const auto paths = all_paths(source, target, predicted);
    Segments seg;
    seg.refs.resize(paths.size());
    seg.hyps.resize(paths.size());
    const long n = static_cast<long>(paths.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        const std::string s = text_of(source, paths[i]);
        seg.refs[i] = diff_tokens(s, text_of(target, paths[i]));
        seg.hyps[i] = diff_tokens(s, text_of(predicted, paths[i]));
    }
    return score(seg);
}

double diff_bleu_serial(const Repository& source, const Repository& target, const Repository& predicted) {
    Segments seg;
    for (const auto& p : all_paths(source, target, predicted)) {
        const std::string s = text_of(source, p);
        seg.refs.push_back(diff_tokens(s, text_of(target, p)));
        seg.hyps.push_back(diff_tokens(s, text_of(predicted, p)));
    }
    return score(seg);
}

} // namespace codeplan

#include <doctest.h>

#include "codeplan/fixtures.hpp"
#include "codeplan/metrics.hpp"
#include "support/oracles.hpp"

#include <random>

using namespace codeplan;
using namespace codeplan::testing;

namespace {

std::string random_string(std::mt19937& rng, std::size_t max_len, int alphabet) {
    std::string s(rng() % (max_len + 1), 'a');
    for (auto& c : s) c = static_cast<char>('a' + rng() % static_cast<unsigned>(alphabet));
    return s;
}

Repository one(const std::string& text) { return Repository::from_sources({{"f.py", text}}); }

class FixedVerdict : public Oracle {
public:
    explicit FixedVerdict(bool pass) : pass_(pass) {}
    OracleVerdict check(const Repository&) override {
        OracleVerdict v;
        v.pass = pass_;
        if (!pass_) v.diagnostics.push_back({"f.py", 1, 1, "broken"});
        return v;
    }
    std::string name() const override { return "fixed"; }

private:
    bool pass_;
};

} // namespace

TEST_CASE("levenshtein: classic pair and edge cases") {
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(levenshtein("", "") == 0);
    CHECK(levenshtein("abc", "") == 3);
    CHECK(levenshtein("", "abcd") == 4);
}

TEST_CASE("levenshtein agrees with the full-table recurrence") {
    std::mt19937 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const std::string a = random_string(rng, 12, 3), b = random_string(rng, 12, 3), c = random_string(rng, 12, 3);
        REQUIRE(levenshtein(a, b) == reference_levenshtein(a, b));
        CHECK(levenshtein(a, b) == levenshtein(b, a));
        CHECK(levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c));
    }
}

TEST_CASE("repository levenshtein sums over the union of files") {
    CHECK(levenshtein_distance(one("x = 1\n"), one("x = 1\n")) == 0);
    const Repository a = Repository::from_sources({{"f.py", "kitten"}});
    const Repository b = Repository::from_sources({{"f.py", "sitting"}, {"g.py", "12345"}});
    CHECK(levenshtein_distance(a, b) == 3 + 5);
    const Scenario s = load_scenario("dict_key");
    CHECK(levenshtein_distance(s.source(), s.target()) == levenshtein_distance_serial(s.source(), s.target()));
}

TEST_CASE("line diff is minimal and its unified form applies") {
    std::mt19937 rng(11);
    for (int i = 0; i < 300; ++i) {
        std::string a, b;
        const int na = static_cast<int>(rng() % 9), nb = static_cast<int>(rng() % 9);
        for (int k = 0; k < na; ++k) a += std::string(1, static_cast<char>('a' + rng() % 4)) + "\n";
        for (int k = 0; k < nb; ++k) b += std::string(1, static_cast<char>('a' + rng() % 4)) + "\n";
        const auto d = line_diff(a, b);
        const auto la = lines_of(a), lb = lines_of(b);
        CHECK(d.size() == la.size() + lb.size() - 2 * reference_lcs(la, lb));
        CHECK(apply_unified_diff(a, unified_diff(a, b, "f")) == b);
    }
    CHECK(unified_diff("a\n", "a\n", "f").empty());
    const auto d = line_diff("x\ny\nz\n", "x\nq\nz\n");
    CHECK(d == std::vector<DiffLine>{{'-', "y"}, {'+', "q"}});
}

TEST_CASE("tokens split on whitespace and punctuation") {
    CHECK(bleu_tokens("c = f(a, b)") == std::vector<std::string>{"c", "=", "f", "(", "a", ",", "b", ")"});
    CHECK(bleu_tokens("  ") .empty());
}

TEST_CASE("corpus BLEU matches the definition") {
    std::mt19937 rng(5);
    const std::vector<std::string> vocab = {"a", "b", "c", "(", ")", "=", "x"};
    for (int i = 0; i < 200; ++i) {
        std::vector<std::vector<std::string>> refs(1 + rng() % 3), hyps(refs.size());
        for (std::size_t s = 0; s < refs.size(); ++s) {
            refs[s].resize(rng() % 12);
            hyps[s].resize(rng() % 12);
            for (auto& t : refs[s]) t = vocab[rng() % vocab.size()];
            for (auto& t : hyps[s]) t = vocab[rng() % vocab.size()];
        }
        CHECK(corpus_bleu(refs, hyps) == doctest::Approx(reference_bleu(refs, hyps)).epsilon(1e-12));
    }
}

TEST_CASE("BLEU: exact match, empty hypothesis, partial overlap and monotonicity") {
    const std::vector<std::string> ref = bleu_tokens("+ c = create_complex ( a , b , metadata ) - c = ( a , b )");
    CHECK(corpus_bleu({ref}, {ref}) == doctest::Approx(1.0));
    CHECK(corpus_bleu({ref}, {{}}) == 0.0);
    std::vector<std::string> half(ref.begin(), ref.begin() + static_cast<long>(ref.size() / 2));
    double prev = corpus_bleu({ref}, {half});
    CHECK(prev > 0.0);
    CHECK(prev < 1.0);
    for (std::size_t k = half.size(); k < ref.size(); ++k) {
        half.push_back(ref[k]);
        const double next = corpus_bleu({ref}, {half});
        CHECK(next >= prev);
        prev = next;
    }
}

TEST_CASE("diff BLEU over fixtures") {
    for (const auto& name : scenario_names()) {
        CAPTURE(name);
        const Scenario s = load_scenario(name);
        CHECK(diff_bleu(s.source(), s.target(), s.target()) == doctest::Approx(1.0));
        CHECK(diff_bleu(s.source(), s.target(), s.source()) == 0.0);
        CHECK(diff_bleu(s.source(), s.source(), s.source()) == 1.0);
        const Repository half = s.source().with_file(s.target().paths().front(),
                                                     s.target().file(s.target().paths().front()).source.text);
        CHECK(diff_bleu(s.source(), s.target(), half) == doctest::Approx(diff_bleu_serial(s.source(), s.target(), half)));
    }
}

TEST_CASE("block metrics on the migration fixture") {
    const Scenario s = load_scenario("complex_migration");
    const Repository src = s.source(), tgt = s.target();
    const BlockCounts exact = block_metrics(src, tgt, tgt);
    CHECK(exact.matched == 2);
    CHECK(exact.missed == 0);
    CHECK(exact.spurious == 0);
    const BlockCounts none = block_metrics(src, tgt, src);
    CHECK(none.matched == 0);
    CHECK(none.missed == 2);
    const Repository only_func = src.with_file("create.py", tgt.file("create.py").source.text);
    const BlockCounts partial = block_metrics(src, tgt, only_func);
    CHECK(partial.matched == 1);
    CHECK(partial.missed == 1);
    CHECK(partial.spurious == 0);
    CHECK(partial.missed_blocks == std::vector<std::string>{"process.py::Method::process.process"});
}

TEST_CASE("whitespace-only edits do not count; files on one side do") {
    const Repository src = one("def f(a, b):\n    return a + b\n");
    const Repository ws = one("def f(a,  b):\n    return a   +   b\n");
    CHECK(edited_blocks(src, ws).empty());
    const Repository extra = Repository::from_sources({{"f.py", "def f(a, b):\n    return a + b\n"},
                                                       {"g.py", "def g():\n    return 1\n"}});
    CHECK(edited_blocks(src, extra) == std::vector<std::string>{"g.py::Method::g.g"});
}

TEST_CASE("a class counts as edited only when its header changes") {
    const Repository src = one("class A:\n    def m(self):\n        return 1\n");
    CHECK(edited_blocks(src, one("class A:\n    def m(self):\n        return 2\n")) ==
          std::vector<std::string>{"f.py::Method::f.A.m"});
    CHECK(edited_blocks(src, one("class A(object):\n    def m(self):\n        return 1\n")) ==
          std::vector<std::string>{"f.py::Class::f.A"});
}

TEST_CASE("block metric identities on random triples") {
    const TripleReport r = check_block_metric_identities(60, 3);
    CHECK(r.triples == 60);
    CHECK_MESSAGE(r.violations == 0, r.first_violation);
}

TEST_CASE("validity needs both the oracle and the ground truth") {
    const Scenario s = load_scenario("complex_migration");
    const Repository src = s.source(), tgt = s.target();
    FixedVerdict ok(true), broken(false);
    CHECK(evaluate(src, tgt, tgt, &ok).valid);
    const Repository only_func = src.with_file("create.py", tgt.file("create.py").source.text);
    CHECK_FALSE(evaluate(src, tgt, only_func, &ok).valid);
    const MetricsReport fail = evaluate(src, tgt, tgt, &broken);
    CHECK(fail.ground_truth_match);
    CHECK_FALSE(fail.valid);
}

TEST_CASE("report table column order") {
    const Scenario s = load_scenario("complex_migration");
    const std::string t = format_table(evaluate(s.source(), s.target(), s.target(), nullptr), "run");
    std::size_t prev = 0;
    for (const char* col : {"Matched", "Missed", "Spurious", "Diff BLEU", "Levenshtein", "Validity"}) {
        const std::size_t p = t.find(col);
        REQUIRE(p != std::string::npos);
        CHECK(p > prev);
        prev = p;
    }
    CHECK(t.find("pass") != std::string::npos);
}

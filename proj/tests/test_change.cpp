#include <doctest.h>

#include "codeplan/change.hpp"
#include "codeplan/errors.hpp"
#include "codeplan/fixtures.hpp"
#include "support/mutate.hpp"

#include <regex>
#include <sstream>

using namespace codeplan;

namespace {

BlockId module_id(const std::string& file) {
    return BlockId::make(file, BlockKind::Module, module_name_for(file));
}

std::vector<ChangeLabel> labels(const std::vector<AtomicChange>& cs) {
    std::vector<ChangeLabel> out;
    for (const auto& c : cs) out.push_back(c.label);
    return out;
}

const char* kHelper = R"(class Helper:
    def __init__(self, name):
        self.name = name

    def greet(self):
        """Say hello."""
        return "hi " + self.name
)";

// Lines present on one side only, whitespace-trimmed.
std::vector<std::string> changed_lines(const std::string& a, const std::string& b) {
    auto lines = [](const std::string& s) {
        std::multiset<std::string> out;
        std::istringstream in(s);
        for (std::string l; std::getline(in, l);) {
            const auto first = l.find_first_not_of(' ');
            if (first != std::string::npos) out.insert(l.substr(first));
        }
        return out;
    };
    const auto la = lines(a), lb = lines(b);
    std::vector<std::string> out;
    std::set_symmetric_difference(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(out));
    return out;
}

} // namespace

TEST_CASE("seed edit to func is a signature and body change") {
    const Scenario s = load_scenario("complex_migration");
    const BlockId func = BlockId::make("create.py", BlockKind::Method, "create.func");
    const auto cs = classify_changes(s.source().file("create.py").source.text,
                                     s.target().file("create.py").source.text, func);
    CHECK(labels(cs) == std::vector{ChangeLabel::MMS, ChangeLabel::MMB});
    CHECK(cs[0].subject == func);
    CHECK(cs[1].subject == func);
    REQUIRE(cs[1].escaping);
    CHECK(*cs[1].escaping);
}

TEST_CASE("identical fragments classify to nothing") {
    CHECK(classify_changes(kHelper, kHelper, module_id("h.py")).empty());
}

TEST_CASE("comment and docstring edits are not changes") {
    std::string after = kHelper;
    after.replace(after.find("Say hello."), 10, "Greets.");
    after.replace(after.find("self.name = name"), 16, "self.name = name  # keep");
    CHECK(classify_changes(kHelper, after, module_id("h.py")).empty());
}

TEST_CASE("new member field plus constructor parameter") {
    const std::string after = R"(class Helper:
    _output: object

    def __init__(self, name, output):
        self.name = name
        self._output = output

    def greet(self):
        """Say hello."""
        return "hi " + self.name
)";
    const auto cs = classify_changes(kHelper, after, module_id("h.py"));
    REQUIRE(cs.size() == 3);
    CHECK(cs[0].label == ChangeLabel::AF);
    CHECK(cs[0].subject == BlockId::make("h.py", BlockKind::Field, "h.Helper._output"));
    CHECK(cs[1].label == ChangeLabel::MCC);
    CHECK(cs[2].label == ChangeLabel::MMB);
    CHECK(cs[2].subject == BlockId::make("h.py", BlockKind::Constructor, "h.Helper.__init__"));
}

TEST_CASE("rename is a deletion plus an addition") {
    std::string after = kHelper;
    after.replace(after.find("def greet"), 9, "def salute");
    CHECK(labels(classify_changes(kHelper, after, module_id("h.py"))) ==
          std::vector{ChangeLabel::AM, ChangeLabel::DM});
}

TEST_CASE("class header and import changes") {
    const std::string before = "import os\nfrom a import b\n\n\nclass K:\n    x = 1\n";
    CHECK(labels(classify_changes(before, "import os\nfrom a import b\n\n\nclass K(object):\n    x = 1\n",
                                  module_id("k.py"))) == std::vector{ChangeLabel::MC});
    CHECK(labels(classify_changes(before, "import os\nfrom a import b as c\n\n\nclass K:\n    x = 1\n",
                                  module_id("k.py"))) == std::vector{ChangeLabel::MI});
    CHECK(labels(classify_changes(before, "import os\nfrom z import b\n\n\nclass K:\n    x = 1\n",
                                  module_id("k.py"))) == std::vector{ChangeLabel::AI, ChangeLabel::DI});
    CHECK(labels(classify_changes(before, "from a import b\n\n\nclass K:\n    x = 2\n", module_id("k.py"))) ==
          std::vector{ChangeLabel::MF, ChangeLabel::DI});
}

TEST_CASE("unparseable side is a classification error") {
    CHECK_THROWS_AS(classify_changes(kHelper, "class Helper(:\n", module_id("h.py")), ParseError);
}

TEST_CASE("escape examples") {
    CHECK(escapes("def ok(x):\n    return True\n", "def ok(x):\n    return False\n"));
    CHECK_FALSE(escapes("def f(x):\n    tmp = x + 1\n    return tmp\n", "def f(x):\n    t2 = x + 1\n    return t2\n"));
    CHECK(escapes("def inc(self):\n    n = 1\n", "def inc(self):\n    n = 1\n    self.count = n\n"));
    CHECK(escapes("def f(p):\n    p.items.append(1)\n", "def f(p):\n    p.items.append(2)\n"));
    CHECK(escapes("def f():\n    raise ValueError('a')\n", "def f():\n    raise KeyError('a')\n"));
    CHECK(escapes("def f():\n    global N\n    N = 1\n", "def f():\n    global N\n    N = 2\n"));
    CHECK_FALSE(escapes("def f(x):\n    y = 1\n    return x\n", "def f(x):\n    y = 2\n    return x\n"));
    // A local that flows into the return value escapes through it.
    CHECK(escapes("def f(x):\n    y = 1\n    return y\n", "def f(x):\n    y = 2\n    return y\n"));
    CHECK(escapes("def f(:\n", "def f():\n    pass\n"));
}

TEST_CASE("escape analysis is conservative on fixture methods") {
    // Oracle: any inserted line that returns, raises, declares a global, or
    // writes an attribute of self or a parameter must count as escaping.
    const std::regex sink(R"(^(return|raise|global|nonlocal)\b|^\w+(\.\w+)+\s*=)");
    const std::vector<std::string> escaping_lines = {"return 0", "raise ValueError()", "self.z = 1"};
    int checked = 0;
    for (const auto& name : scenario_names()) {
        const Repository r = load_scenario(name).source();
        for (const auto* b : r.blocks()) {
            if (b->kind != BlockKind::Method && b->kind != BlockKind::Constructor) continue;
            const std::size_t body_at = b->node->body.front()->line_start - b->span.start;
            std::vector<std::string> inserts = escaping_lines;
            if (!b->node->params.empty()) inserts.push_back(b->node->params.front().name + ".q = 1");
            inserts.push_back("_local = 3");
            for (const auto& line : inserts) {
                std::string after = b->text;
                after.insert(body_at, std::string(static_cast<std::size_t>(b->node->body.front()->indent), ' ') +
                                          line + "\n");
                bool oracle = false;
                for (const auto& l : changed_lines(b->text, after)) oracle = oracle || std::regex_search(l, sink);
                if (oracle) CHECK(escapes(b->text, after));
                else CHECK_FALSE(escapes(b->text, after));
                ++checked;
            }
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("classified changes respect the field contract and cover every differing declaration") {
    std::mt19937 rng(7);
    int checked = 0;
    for (const auto& name : scenario_names()) {
        const Repository r = load_scenario(name).source();
        for (int i = 0; i < 60; ++i) {
            const auto m = testing::next_mutation(r, rng);
            if (!m) break;
            const auto cs = classify_changes(m->before, m->after, module_id(m->file));
            for (const auto& c : cs) {
                CHECK(c.escaping.has_value() == (c.label == ChangeLabel::MMB));
                if (is_addition(c.label)) CHECK((!c.before_text && c.after_text));
                else if (is_deletion(c.label)) CHECK((c.before_text && !c.after_text));
                else CHECK((c.before_text && c.after_text));
            }
            // Oracle: element-by-element comparison of declaration texts.
            auto decls = [](const std::string& file, const std::string& text) {
                std::map<std::string, std::string> out;
                const auto pf = parse_file(file, text);
                for (const auto& b : pf->blocks) {
                    if (b.kind == BlockKind::Module || b.kind == BlockKind::Statement) continue;
                    out[b.id.str()] = b.kind == BlockKind::Class
                                          ? text.substr(b.node->header.start, b.node->header.end - b.node->header.start)
                                          : b.text;
                }
                return out;
            };
            const auto before = decls(m->file, m->before), after = decls(m->file, m->after);
            std::set<std::string> differing;
            for (const auto& [id, t] : before)
                if (!after.count(id) || after.at(id) != t) differing.insert(id);
            for (const auto& [id, t] : after)
                if (!before.count(id)) differing.insert(id);
            std::map<std::string, std::set<ChangeLabel>> covered;
            for (const auto& c : cs) covered[c.subject.str()].insert(c.label);
            std::set<std::string> covered_ids;
            for (const auto& [id, ls] : covered) {
                covered_ids.insert(id);
                const bool pair = ls.size() == 2 && ls.count(ChangeLabel::MMB) &&
                                  (ls.count(ChangeLabel::MMS) || ls.count(ChangeLabel::MCC));
                CHECK_MESSAGE((ls.size() == 1 || pair), m->description);
            }
            CHECK_MESSAGE(covered_ids == differing, m->description);
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("signature update keeps callers and recomputes callees") {
    const Scenario s = load_scenario("complex_migration");
    const Repository before = s.source();
    const Repository after = before.with_file("create.py", s.target().file("create.py").source.text);
    const BlockId func = BlockId::make("create.py", BlockKind::Method, "create.func");
    const DependencyGraph D = construct_dependency_graph(before);
    const auto cs = classify_changes(before.file("create.py").source.text, after.file("create.py").source.text, func);
    const DependencyGraph D2 = update_dependency_graph(D, cs, before, after, func);
    CHECK(D2.same_edges(construct_dependency_graph(after)));
    CHECK(D2.rel(func, RelationLabel::CalledBy) == D.rel(func, RelationLabel::CalledBy));
}

TEST_CASE("constructor signature change leaves the graph alone") {
    const Repository before = Repository::from_sources({{"h.py", kHelper}});
    std::string text = kHelper;
    text.replace(text.find("(self, name)"), 12, "(self, name, extra=None)");
    const Repository after = before.with_file("h.py", text);
    const DependencyGraph D = construct_dependency_graph(before);
    const auto cs = classify_changes(kHelper, text, module_id("h.py"));
    CHECK(labels(cs) == std::vector{ChangeLabel::MCC});
    CHECK(update_dependency_graph(D, cs, before, after, module_id("h.py")).same_edges(D));
}

TEST_CASE("adding an override redirects calls on the subclass receiver") {
    const std::string before = R"(class B:
    def m(self):
        return 1


class C(B):
    def other(self):
        return 2


def use(c: C):
    return c.m()
)";
    std::string after = before;
    after.replace(after.find("    def other"), 0, "    def m(self):\n        return 3\n\n");
    const Repository r0 = Repository::from_sources({{"o.py", before}});
    const Repository r1 = r0.with_file("o.py", after);
    const BlockId use = BlockId::make("o.py", BlockKind::Method, "o.use");
    const BlockId bm = BlockId::make("o.py", BlockKind::Method, "o.B.m");
    const BlockId cm = BlockId::make("o.py", BlockKind::Method, "o.C.m");
    const DependencyGraph D = construct_dependency_graph(r0);
    CHECK(D.rel(use, RelationLabel::Calls) == std::set<BlockId>{bm});
    const auto cs = classify_changes(before, after, module_id("o.py"));
    CHECK(labels(cs) == std::vector{ChangeLabel::AM});
    const DependencyGraph D2 = update_dependency_graph(D, cs, r0, r1, module_id("o.py"));
    CHECK(D2.rel(use, RelationLabel::Calls) == std::set<BlockId>{cm});
    CHECK(D2.rel(cm, RelationLabel::Overrides) == std::set<BlockId>{bm});

    // Deleting it again sends the call back to the base method.
    const auto back = classify_changes(after, before, module_id("o.py"));
    CHECK(labels(back) == std::vector{ChangeLabel::DM});
    CHECK(update_dependency_graph(D2, back, r1, r0, module_id("o.py")).same_edges(D));
}

TEST_CASE("changes naming blocks the graph does not know are inconsistent") {
    const Repository r = Repository::from_sources({{"h.py", kHelper}});
    const DependencyGraph D = construct_dependency_graph(r);
    AtomicChange c;
    c.label = ChangeLabel::MMB;
    c.subject = BlockId::make("h.py", BlockKind::Method, "h.Helper.missing");
    c.before_text = c.after_text = "def missing(self):\n    pass";
    c.escaping = false;
    CHECK_THROWS_AS(update_dependency_graph(D, {c}, r, r, module_id("h.py")), InconsistencyError);
    c.label = ChangeLabel::AM;
    c.before_text.reset();
    c.escaping.reset();
    CHECK_THROWS_AS(update_dependency_graph(D, {c}, r, r, module_id("h.py")), InconsistencyError);
}

TEST_CASE("incremental update matches a rebuild after random edit sequences") {
    for (const auto& name : scenario_names()) {
        const auto rep = testing::check_incremental_soundness(load_scenario(name).source(), 15, 12, 11);
        INFO(rep.first_mismatch);
        CHECK(rep.mismatches == 0);
        CHECK(rep.edits > 0);
    }
}

#include <doctest.h>

#include "codeplan/change.hpp"
#include "codeplan/impact.hpp"
#include "support/rule_goldens.hpp"

using namespace codeplan;
using namespace codeplan::testing;

namespace {

using L = RelationLabel;

std::string edited(std::string from, const std::string& what, const std::string& with) {
    const auto at = from.find(what);
    REQUIRE(at != std::string::npos);
    from.replace(at, what.size(), with);
    return from;
}

} // namespace

TEST_CASE("one golden per change label") {
    const auto goldens = rule_goldens();
    std::set<ChangeLabel> covered;
    for (const auto& g : goldens) {
        SUBCASE(g.name.c_str()) {
            const RuleOutcome o = run_rule_golden(g);
            CHECK(o.labels == g.labels);
            CHECK(o.rebuild_matches);
            CHECK(o.added == g.added);
            CHECK(o.removed == g.removed);
            CHECK(o.affected == g.affected);
            CHECK(compare_rule_golden(g, o).empty());
        }
        covered.insert(g.labels.begin(), g.labels.end());
    }
    CHECK(covered.size() == static_cast<std::size_t>(kChangeLabelCount));
}

TEST_CASE("AF on a root class with one constructor and one subclass") {
    const std::string before = "class P:\n    a: int = 0\n\n    def __init__(self):\n        self.a = 1\n\n\n"
                               "class Q(P):\n    pass\n";
    const std::string after = edited(before, "    a: int = 0\n", "    a: int = 0\n    b: int = 0\n");
    const Repository r0 = Repository::from_sources({{"p.py", before}});
    const Repository r1 = r0.with_file("p.py", after);
    const BlockId mod = BlockId::make("p.py", BlockKind::Module, "p");
    const DependencyGraph D = construct_dependency_graph(r0);
    const auto cs = classify_changes(before, after, mod);
    const DependencyGraph D2 = update_dependency_graph(D, cs, r0, r1, mod);
    CHECK(get_affected_blocks(cs, BlockId::make("p.py", BlockKind::Class, "p.P"), D, D2) ==
          std::set<AffectedBlock>{{BlockId::make("p.py", BlockKind::Constructor, "p.P.__init__"), L::ConstructedBy},
                                  {BlockId::make("p.py", BlockKind::Class, "p.Q"), L::DerivedClassOf}});
}

TEST_CASE("the edited block is never its own affected block") {
    // Editing K.f's fragment also changes the field f reads.
    const std::string before = "class K:\n    x: int = 0\n\n    def f(self):\n        return self.x\n";
    const std::string after = "class K:\n    x: int = 1\n\n    def f(self):\n        return self.x + 1\n";
    const Repository r0 = Repository::from_sources({{"k.py", before}});
    const Repository r1 = r0.with_file("k.py", after);
    const BlockId f = BlockId::make("k.py", BlockKind::Method, "k.K.f");
    const DependencyGraph D = construct_dependency_graph(r0);
    CHECK(D.rel(BlockId::make("k.py", BlockKind::Field, "k.K.x"), L::UsedBy) == std::set<BlockId>{f});
    const auto cs = classify_changes(before, after, f);
    CHECK(get_affected_blocks(cs, f, D, update_dependency_graph(D, cs, r0, r1, f)).empty());
}

TEST_CASE("direct recursion adds no self edge") {
    const Repository r = Repository::from_sources({{"s.py", "def f(n):\n    return f(n - 1)\n"}});
    CHECK(construct_dependency_graph(r).rel(BlockId::make("s.py", BlockKind::Method, "s.f"), L::Calls).empty());
}

TEST_CASE("fixture seed edit reaches the caller only") {
    // func's new signature and escaping body both point at process.
    const std::string src = "def func(a):\n    return (a, 1)\n\n\ndef process(a):\n    return func(a)[0]\n";
    const std::string dst = "def func(a) -> int:\n    return a\n\n\ndef process(a):\n    return func(a)[0]\n";
    const Repository r0 = Repository::from_sources({{"c.py", src}});
    const Repository r1 = r0.with_file("c.py", dst);
    const BlockId func = BlockId::make("c.py", BlockKind::Method, "c.func");
    const DependencyGraph D = construct_dependency_graph(r0);
    const auto cs = classify_changes(src, dst, func);
    CHECK(get_affected_blocks(cs, func, D, update_dependency_graph(D, cs, r0, r1, func)) ==
          std::set<AffectedBlock>{{BlockId::make("c.py", BlockKind::Method, "c.process"), L::CalledBy}});
}

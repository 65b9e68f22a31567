#include <doctest.h>

#include "codeplan/context.hpp"
#include "codeplan/depgraph.hpp"
#include "codeplan/fixtures.hpp"
#include "codeplan/plangraph.hpp"

using namespace codeplan;

namespace {

BlockId m(const std::string& qn) { return BlockId::make("x.py", BlockKind::Method, "x." + qn); }

} // namespace

TEST_CASE("roots in input order, FIFO scheduling") {
    PlanGraph g;
    g.add_roots({{m("a"), "do a"}, {m("b"), "do b"}});
    CHECK(g.nodes().size() == 2);
    CHECK(g.edges().empty());
    CHECK(g.node(*g.next_pending()).block == m("a"));
    g.mark_completed(0);
    const int c = *g.select_or_add_node(m("c"));
    g.add_edge(0, c, RelationLabel::CalledBy);
    CHECK(g.node(*g.next_pending()).block == m("b"));
    g.mark_completed(1);
    CHECK(g.node(*g.next_pending()).block == m("c"));
    g.mark_completed(c);
    CHECK_FALSE(g.has_pending());
}

TEST_CASE("empty seed list leaves nothing to do") {
    PlanGraph g;
    g.add_roots({});
    CHECK_FALSE(g.has_pending());
}

TEST_CASE("duplicate seeds merge, instructions in order") {
    PlanGraph g;
    g.add_roots({{m("a"), "first"}, {m("a"), "second"}});
    REQUIRE(g.nodes().size() == 1);
    CHECK(g.node(0).instruction == "first\nsecond");
}

TEST_CASE("pending node is reused; two causes give two edges") {
    PlanGraph g;
    g.add_roots({{m("a"), ""}});
    const int n1 = *g.select_or_add_node(m("b"));
    const int n2 = *g.select_or_add_node(m("b"));
    CHECK(n1 == n2);
    g.add_edge(0, n1, RelationLabel::CalledBy);
    g.add_edge(0, n1, RelationLabel::UsedBy);
    g.add_edge(0, n1, RelationLabel::UsedBy);
    CHECK(g.incoming(n1).size() == 2);
}

TEST_CASE("completion is idempotent and never undoes a failure") {
    PlanGraph g;
    g.add_roots({{m("a"), ""}, {m("b"), ""}});
    g.mark_completed(0);
    g.mark_completed(0);
    CHECK(g.node(0).status == ObligationStatus::Completed);
    g.mark_failed(1);
    g.mark_completed(1);
    CHECK(g.node(1).status == ObligationStatus::Failed);
}

TEST_CASE("re-activation gets a new generation scheduled after earlier pendings") {
    PlanGraph g(3);
    g.add_roots({{m("a"), ""}, {m("b"), ""}});
    g.mark_completed(0);
    const int again = *g.select_or_add_node(m("a"));
    CHECK(again != 0);
    CHECK(g.node(again).generation == 2);
    CHECK(*g.next_pending() == 1);
    g.mark_completed(1);
    CHECK(*g.next_pending() == again);
    g.mark_completed(again);
    const int third = *g.select_or_add_node(m("a"));
    g.mark_completed(third);
    CHECK_FALSE(g.select_or_add_node(m("a")).has_value());
}

TEST_CASE("cycle-closing edges are kept but skipped by ancestry") {
    PlanGraph g;
    g.add_roots({{m("a"), ""}});
    const int b = *g.select_or_add_node(m("b"));
    g.add_edge(0, b, RelationLabel::CalledBy);
    g.add_edge(b, 0, RelationLabel::CalledBy);
    REQUIRE(g.edges().size() == 2);
    CHECK_FALSE(g.edges()[0].cyclic);
    CHECK(g.edges()[1].cyclic);
    CHECK(g.ancestors(b) == std::vector<int>{0});
    CHECK(g.ancestors(0).empty());
}

TEST_CASE("ancestors come in seq order without repeats (diamond)") {
    PlanGraph g;
    g.add_roots({{m("r"), ""}});
    const int l = *g.select_or_add_node(m("l"));
    const int rr = *g.select_or_add_node(m("rr"));
    const int d = *g.select_or_add_node(m("d"));
    g.add_edge(0, l, RelationLabel::CalledBy);
    g.add_edge(0, rr, RelationLabel::CalledBy);
    g.add_edge(l, d, RelationLabel::CalledBy);
    g.add_edge(rr, d, RelationLabel::UsedBy);
    CHECK(g.ancestors(d) == std::vector<int>{0, l, rr});
}

// -- context ------------------------------------------------------------------

TEST_CASE("spatial context of process holds its callees") {
    const Repository r = load_scenario("complex_migration").source();
    const DependencyGraph D = construct_dependency_graph(r);
    const auto sp = gather_spatial_context(BlockId::make("process.py", BlockKind::Method, "process.process"), r, D);
    std::vector<std::string> calls;
    for (const auto& e : sp) {
        CHECK(D.has_edge(BlockId::make("process.py", BlockKind::Method, "process.process"), e.relation, e.block));
        if (e.relation == RelationLabel::Calls) calls.push_back(display_name(e.block));
    }
    CHECK(calls == std::vector<std::string>{"compute_norm", "func"});
    CHECK(sp.front().relation == RelationLabel::Calls);
}

TEST_CASE("isolated function has empty spatial context") {
    const Repository r = Repository::from_sources({{"i.py", "def f(x):\n    return x\n"}});
    CHECK(gather_spatial_context(BlockId::make("i.py", BlockKind::Method, "i.f"), r, construct_dependency_graph(r))
              .empty());
}

TEST_CASE("instantiated class shows up as a folded sketch") {
    const Repository r = load_scenario("complex_migration").source();
    const DependencyGraph D = construct_dependency_graph(r);
    const auto sp =
        gather_spatial_context(BlockId::make("complexlib.py", BlockKind::Method, "complexlib.create_complex"), r, D);
    auto it = std::find_if(sp.begin(), sp.end(), [](const auto& e) { return e.relation == RelationLabel::Instantiates; });
    REQUIRE(it != sp.end());
    CHECK(it->sketch.find("<folded:1>") != std::string::npos);
    CHECK(it->sketch.find("self.real = real") == std::string::npos);
}

TEST_CASE("spatial context respects the cap and priority") {
    std::string src;
    for (int i = 0; i < 12; ++i) src += "def h" + std::to_string(i) + "():\n    return 1\n\n\n";
    src += "def top():\n";
    for (int i = 0; i < 12; ++i) src += "    h" + std::to_string(i) + "()\n";
    const Repository r = Repository::from_sources({{"c.py", src}});
    const auto sp = gather_spatial_context(BlockId::make("c.py", BlockKind::Method, "c.top"), r,
                                           construct_dependency_graph(r), 8);
    CHECK(sp.size() == 8);
}

TEST_CASE("temporal context along a chain and at a root") {
    PlanGraph g;
    g.add_roots({{BlockId::make("create.py", BlockKind::Method, "create.func"), "seed"}});
    g.node(0).before_text = "old";
    g.node(0).after_text = "new";
    g.mark_completed(0);
    const int p = *g.select_or_add_node(BlockId::make("process.py", BlockKind::Method, "process.process"));
    g.add_edge(0, p, RelationLabel::CalledBy);
    const Repository r;
    const TemporalContext t = gather_temporal_context(g, p, r);
    REQUIRE(t.edits.size() == 1);
    CHECK(t.edits[0].before == "old");
    CHECK(t.edits[0].after == "new");
    CHECK(t.causes == std::vector<std::string>{"process is related to func by CalledBy"});
    const TemporalContext root = gather_temporal_context(g, 0, r);
    CHECK(root.edits.empty());
    CHECK(root.causes.empty());
}

TEST_CASE("temporal context of a diamond") {
    PlanGraph g;
    g.add_roots({{m("r"), ""}});
    const int a = *g.select_or_add_node(m("a"));
    const int b = *g.select_or_add_node(m("b"));
    const int d = *g.select_or_add_node(m("d"));
    g.add_edge(0, a, RelationLabel::CalledBy);
    g.add_edge(0, b, RelationLabel::CalledBy);
    g.add_edge(a, d, RelationLabel::CalledBy);
    g.add_edge(b, d, RelationLabel::CalledBy);
    for (int id : {0, a, b}) {
        g.node(id).before_text = "b" + std::to_string(id);
        g.node(id).after_text = "a" + std::to_string(id);
    }
    const TemporalContext t = gather_temporal_context(g, d, Repository());
    CHECK(t.edits.size() == 3);
    CHECK(t.edits[0].before == "b0");
    CHECK(t.causes.size() == 2);
}

namespace {

PromptParts sample_parts() {
    PromptParts p;
    p.task = "Rename things.";
    p.instruction = "Rename f.";
    p.temporal.edits.push_back({m("f"), "def f():\n    pass", "def g():\n    pass"});
    p.temporal.causes.push_back("h is related to f by CalledBy");
    p.spatial.push_back({m("k"), RelationLabel::Calls, "def k():\n    return 0"});
    p.spatial.push_back({m("j"), RelationLabel::Uses, "j: int = 0"});
    p.code = "def h():\n    f()";
    return p;
}

std::size_t at(const std::string& s, const std::string& what) { return s.find(what); }

} // namespace

TEST_CASE("prompt sections in order") {
    const std::string s = make_prompt(sample_parts(), {});
    const std::vector<std::string> heads = {"Task Instructions:", "Earlier Code Changes (Temporal Context):",
                                            "Causes for Change:", "Related Code (Spatial Context):",
                                            "Code to be Changed Next:", "No changes."};
    std::size_t prev = 0;
    for (const auto& h : heads) {
        const std::size_t p = at(s, h);
        REQUIRE(p != std::string::npos);
        CHECK(p >= prev);
        prev = p;
    }
    CHECK(s.find("Before:") != std::string::npos);
    CHECK(s.find("h is related to f by CalledBy") != std::string::npos);
    CHECK(s.find("def h():\n    f()") != std::string::npos);
    CHECK(make_prompt(sample_parts(), {}) == s);
}

TEST_CASE("ablation flags drop sections") {
    ContextOptions no_t;
    no_t.temporal = false;
    const std::string a = make_prompt(sample_parts(), no_t);
    CHECK(a.find("Earlier Code Changes (Temporal Context):") == std::string::npos);
    CHECK(a.find("Causes for Change:") == std::string::npos);
    CHECK(a.find("Related Code (Spatial Context):") != std::string::npos);
    ContextOptions no_s;
    no_s.spatial = false;
    const std::string b = make_prompt(sample_parts(), no_s);
    CHECK(b.find("Related Code (Spatial Context):") == std::string::npos);
    CHECK(b.find("Causes for Change:") != std::string::npos);
    CHECK(context_text(sample_parts(), no_s).find("def k()") == std::string::npos);
}

TEST_CASE("empty sections say (none)") {
    PromptParts p;
    p.task = "t";
    p.code = "x = 1";
    const std::string s = make_prompt(p, {});
    std::size_t n = 0;
    for (std::size_t pos = s.find("(none)"); pos != std::string::npos; pos = s.find("(none)", pos + 1)) ++n;
    CHECK(n == 3);
    CHECK(s.find("x = 1") != std::string::npos);
}

TEST_CASE("length cap drops spatial entries from the end, never the code") {
    PromptParts p = sample_parts();
    const std::size_t full = make_prompt(p, {}).size();
    ContextOptions o;
    o.max_prompt_chars = full - 5;
    const std::string s = make_prompt(p, o);
    CHECK(s.size() <= o.max_prompt_chars);
    CHECK(s.find("def k()") != std::string::npos);
    CHECK(s.find("j: int") == std::string::npos);
    o.max_prompt_chars = 10;
    const std::string tiny = make_prompt(p, o);
    CHECK(tiny.find("def h():\n    f()") != std::string::npos);
    CHECK(tiny.find("def k()") == std::string::npos);
}

#include <doctest.h>

#include "codeplan/errors.hpp"
#include "codeplan/fixtures.hpp"
#include "codeplan/oracle.hpp"

using namespace codeplan;

namespace {

const char* kLib = "def load(path, mode):\n    return path\n\n\ndef save(path, data=None):\n    return data\n";

Repository with_caller(const std::string& call) {
    return Repository::from_sources({{"lib.py", kLib}, {"app.py", "from lib import load, save\n\n\ndef main():\n    " + call + "\n"}});
}

} // namespace

TEST_CASE("missing required argument is reported at the call site") {
    const OracleVerdict v = internal_checker(with_caller("load('x')"));
    CHECK_FALSE(v.pass);
    REQUIRE(v.diagnostics.size() == 1);
    CHECK(v.diagnostics[0].file == "app.py");
    CHECK(v.diagnostics[0].line_start == 5);
    CHECK(v.diagnostics[0].message.find("mode") != std::string::npos);
}

TEST_CASE("omitted defaulted argument is silent unless strict") {
    const Repository r = with_caller("save('x')");
    CHECK(internal_checker(r).pass);
    const OracleVerdict strict = internal_checker(r, true);
    CHECK_FALSE(strict.pass);
    REQUIRE(strict.diagnostics.size() == 1);
    CHECK(strict.diagnostics[0].message.find("data") != std::string::npos);
}

TEST_CASE("pass iff no diagnostics, and every target passes") {
    for (const auto& name : scenario_names()) {
        CAPTURE(name);
        const OracleVerdict v = internal_checker(load_scenario(name).target());
        CHECK(v.pass);
        CHECK(v.pass == v.diagnostics.empty());
    }
}

TEST_CASE("parse errors become diagnostics") {
    const Repository r = Repository::from_sources({{"bad.py", "def f(:\n    pass\n"}});
    const OracleVerdict v = internal_checker(r);
    REQUIRE(v.diagnostics.size() == 1);
    CHECK(v.diagnostics[0].file == "bad.py");
    CHECK(v.diagnostics[0].line_start == 1);
}

TEST_CASE("command oracle parses file:line: message output") {
    CommandOracle o({"printf 'a.py:3: error: bad call\\n'; exit 1"});
    const OracleVerdict v = o.check(with_caller("load('x', 'r')"));
    CHECK_FALSE(v.pass);
    REQUIRE(v.diagnostics.size() == 1);
    CHECK(v.diagnostics[0].file == "a.py");
    CHECK(v.diagnostics[0].line_start == 3);
    CHECK(v.diagnostics[0].message == "bad call");
}

TEST_CASE("command oracle sees the materialized repository") {
    CommandOracle o({"cd {repo} && grep -n 'load(' app.py | sed 's/^/app.py:/'"});
    const OracleVerdict v = o.check(with_caller("load('x', 'r')"));
    REQUIRE(v.diagnostics.size() == 1);
    CHECK(v.diagnostics[0].file == "app.py");
    CHECK(v.diagnostics[0].line_start == 5);
}

TEST_CASE("command oracle exit status without parsed diagnostics") {
    CHECK(CommandOracle({"true"}).check(with_caller("pass")).pass);
    const OracleVerdict v = CommandOracle({"echo something odd; exit 2"}).check(with_caller("pass"));
    CHECK_FALSE(v.pass);
    REQUIRE(v.diagnostics.size() == 1);
    CHECK(v.diagnostics[0].file.empty());
    CHECK(v.diagnostics[0].message.find("status 2") != std::string::npos);
}

TEST_CASE("command oracle infrastructure failures") {
    CHECK_THROWS_AS(CommandOracle({"definitely-not-a-command-xyz"}).check(with_caller("pass")), OracleInfraError);
    CommandOracleConfig slow{"sleep 5"};
    slow.timeout = std::chrono::seconds(1);
    CHECK_THROWS_AS(CommandOracle(slow).check(with_caller("pass")), OracleInfraError);
}

TEST_CASE("json diagnostics, plain and pyright shaped") {
    CommandOracleConfig c{"unused"};
    c.format = CommandOracleConfig::Format::Json;
    auto plain = parse_diagnostics(R"([{"file":"/ws/a.py","line":4,"message":"m"}])", c, "/ws");
    REQUIRE(plain.size() == 1);
    CHECK(plain[0].file == "a.py");
    CHECK(plain[0].line_start == 4);
    auto py = parse_diagnostics(
        R"({"generalDiagnostics":[{"file":"/ws/b.py","severity":"error","message":"x",
            "range":{"start":{"line":2,"character":0},"end":{"line":3,"character":1}}},
           {"file":"/ws/b.py","severity":"warning","message":"w",
            "range":{"start":{"line":0,"character":0},"end":{"line":0,"character":1}}}]})",
        c, "/ws");
    REQUIRE(py.size() == 1);
    CHECK(py[0].line_start == 3);
    CHECK(py[0].line_end == 4);
}

TEST_CASE("regex patterns need file, line and message groups") {
    CommandOracleConfig c{"unused"};
    c.pattern = R"((?P<file>\S+) (?P<line>\d+))";
    CHECK_THROWS_AS(parse_diagnostics("a.py 3", c, ""), ConfigError);
    c.pattern = R"((?P<file>\S+) (?P<line>\d+) (?P<message>.*))";
    const auto d = parse_diagnostics("a.py 3 oops\nnoise\n", c, "");
    REQUIRE(d.size() == 1);
    CHECK(d[0].message == "oops");
}

TEST_CASE("diagnostics map to the innermost block") {
    const Repository r = Repository::from_sources(
        {{"m.py", "import os\n\n\nclass A:\n    def f(self):\n        x = 1\n        return y\n\n    def g(self):\n"
                  "        return 2\n"}});
    OracleVerdict v;
    v.pass = false;
    v.diagnostics = {{"m.py", 7, 7, "name 'y' is not defined"},
                     {"m.py", 6, 6, "another"},
                     {"m.py", 1, 1, "unused import"},
                     {"", 0, 0, "oracle command exited with status 1"},
                     {"gone.py", 1, 1, "stale"}};
    const auto seeds = diagnostics_to_seeds(v, r);
    REQUIRE(seeds.size() == 2);
    CHECK(seeds[0].block == BlockId::make("m.py", BlockKind::Method, "m.A.f"));
    CHECK(seeds[0].instruction.find("line 6: another") != std::string::npos);
    CHECK(seeds[0].instruction.find("line 7: name 'y'") != std::string::npos);
    CHECK(seeds[1].block.str().rfind("m.py::Import::", 0) == 0);
}

TEST_CASE("diagnostic in an unparseable file seeds its module") {
    const Repository r = Repository::from_sources({{"bad.py", "def f(:\n"}});
    const auto seeds = diagnostics_to_seeds(internal_checker(r), r);
    REQUIRE(seeds.size() == 1);
    CHECK(seeds[0].block == BlockId::make("bad.py", BlockKind::Module, "bad"));
}

TEST_CASE("seed selectors") {
    const Repository r = load_scenario("complex_migration").source();
    const SeedSet s = load_seeds(nlohmann::json::parse(R"({"task":"t","seeds":[
        {"file":"create.py","qualified_name":"create.func","instruction":"a"},
        {"block":"create.py::Method::create.func","instruction":"b"},
        {"file":"complexlib.py","qualified_name":"complexlib.Complex","kind":"Class","instruction":"c"}]})"),
                                 r);
    REQUIRE(s.seeds.size() == 2);
    CHECK(s.seeds[0].instruction == "a\nb");
    CHECK(s.task == "t");
    CHECK_THROWS_AS(load_seeds(nlohmann::json::parse(R"({"seeds":[{"file":"create.py","qualified_name":"nope"}]})"), r),
                    ConfigError);
}

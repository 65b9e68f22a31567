#include "codeplan/cli.hpp"

#include "codeplan/depgraph.hpp"
#include "codeplan/engine.hpp"
#include "codeplan/errors.hpp"
#include "codeplan/fixtures.hpp"
#include "codeplan/metrics.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace codeplan {

namespace {

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(p.string() + ": " + e.what());
    }
}

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write " + p.string());
    f << text;
}

Repository load_repo(const std::string& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir);
    return parse_repository(dir);
}

// Flags for run and baseline. Empty / unset values fall back to the config
// file, then to built-in defaults.
struct RunFlags {
    std::string repo, seeds, editor, rules, replay, oracle, oracle_cmd, out, target, config;
    bool strict = false, no_temporal = false, no_spatial = false;
    int max_iters = -1, max_rounds = -1;
};

struct RunSetup {
    std::unique_ptr<Editor> editor;
    std::unique_ptr<Oracle> oracle;
    RunOptions options;
};

// Relative paths inside a config file are taken from the file's directory.
std::string config_path(const nlohmann::json& section, const char* key, const fs::path& base) {
    if (!section.contains(key)) return {};
    const fs::path p = section.at(key).get<std::string>();
    return (p.is_absolute() ? p : base / p).string();
}

std::unique_ptr<Oracle> make_oracle(std::string kind, bool strict, std::string command, const nlohmann::json& cfg) {
    if (kind.empty()) kind = cfg.value("kind", "internal");
    if (kind == "internal") return std::make_unique<InternalOracle>(strict || cfg.value("strict", false));
    if (kind != "command") throw ConfigError("unknown oracle: " + kind);
    CommandOracleConfig c;
    c.command = command.empty() ? cfg.value("command", "") : command;
    if (c.command.empty()) throw ConfigError("the command oracle needs --oracle-cmd or oracle.command");
    const std::string format = cfg.value("format", "regex");
    if (format == "json") c.format = CommandOracleConfig::Format::Json;
    else if (format != "regex") throw ConfigError("oracle.format must be regex or json");
    if (cfg.contains("pattern")) c.pattern = cfg.at("pattern").get<std::string>();
    if (cfg.contains("timeout_s")) c.timeout = std::chrono::seconds(cfg.at("timeout_s").get<int>());
    return std::make_unique<CommandOracle>(std::move(c));
}

RunSetup setup(const RunFlags& f) {
    nlohmann::json cfg = nlohmann::json::object();
    fs::path base = fs::current_path();
    if (!f.config.empty()) {
        cfg = read_json(f.config);
        if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
        for (const auto& [k, v] : cfg.items())
            if (k != "editor" && k != "oracle" && k != "budgets" && k != "context")
                throw ConfigError("unknown config section: " + k);
        base = fs::absolute(f.config).parent_path();
    }
    const nlohmann::json ed = cfg.value("editor", nlohmann::json::object());
    const nlohmann::json orc = cfg.value("oracle", nlohmann::json::object());
    const nlohmann::json bud = cfg.value("budgets", nlohmann::json::object());
    const nlohmann::json ctx = cfg.value("context", nlohmann::json::object());

    RunSetup s;
    std::string kind = f.editor.empty() ? ed.value("kind", "") : f.editor;
    const std::string rules = f.rules.empty() ? config_path(ed, "rules", base) : f.rules;
    const std::string replay = f.replay.empty() ? config_path(ed, "replay", base) : f.replay;
    if (kind.empty()) kind = !rules.empty() ? "rule" : !replay.empty() ? "replay" : "";
    if (kind == "rule") {
        if (rules.empty()) throw ConfigError("the rule editor needs --rules");
        s.editor = std::make_unique<RuleEditor>(RuleEditor::from_json(read_json(rules)));
    } else if (kind == "replay") {
        if (replay.empty()) throw ConfigError("the replay editor needs --replay");
        s.editor = std::make_unique<ReplayEditor>(ReplayEditor::from_json(read_json(replay)));
    } else if (kind == "remote") {
        s.editor = std::make_unique<RemoteEditor>(RemoteEditorConfig::from_json(ed.value("remote", nlohmann::json::object())));
    } else {
        throw ConfigError("--editor must be rule, replay or remote");
    }
    s.oracle = make_oracle(f.oracle, f.strict, f.oracle_cmd, orc);

    RunOptions& o = s.options;
    o.max_iterations = f.max_iters >= 0 ? f.max_iters : bud.value("max_iterations", o.max_iterations);
    o.max_rounds = f.max_rounds >= 0 ? f.max_rounds : bud.value("max_rounds", o.max_rounds);
    o.generation_cap = bud.value("generation_cap", o.generation_cap);
    if (bud.contains("node_budget")) o.node_budget = bud.at("node_budget").get<std::size_t>();
    o.context.temporal = !f.no_temporal && ctx.value("temporal", true);
    o.context.spatial = !f.no_spatial && ctx.value("spatial", true);
    o.context.max_spatial = ctx.value("max_spatial", o.context.max_spatial);
    o.context.max_prompt_chars = ctx.value("max_prompt_chars", o.context.max_prompt_chars);
    if (o.max_iterations < 1) throw ConfigError("max iterations must be at least 1");
    return s;
}

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("repo", f.repo, "Repository directory")->required();
    cmd->add_option("--seeds", f.seeds, "Seed edits (JSON)")->required();
    cmd->add_option("--editor", f.editor, "rule, replay or remote")->check(CLI::IsMember({"rule", "replay", "remote"}));
    cmd->add_option("--rules", f.rules, "Rule editor rules (JSON)");
    cmd->add_option("--replay", f.replay, "Replay editor recording (JSON)");
    cmd->add_option("--oracle", f.oracle, "internal or command")->check(CLI::IsMember({"internal", "command"}));
    cmd->add_option("--oracle-cmd", f.oracle_cmd, "Checker command; {repo} is the workspace");
    cmd->add_flag("--strict", f.strict, "Internal oracle also reports omitted defaulted arguments");
    cmd->add_flag("--no-temporal-context", f.no_temporal, "Leave earlier edits and causes out of prompts");
    cmd->add_flag("--no-spatial-context", f.no_spatial, "Leave related code out of prompts");
    cmd->add_option("--max-iters", f.max_iters, "Oracle iterations");
    cmd->add_option("--max-rounds", f.max_rounds, "Baseline repair rounds");
    cmd->add_option("--out", f.out, "Run directory")->required();
    cmd->add_option("--target", f.target, "Ground-truth repository; adds metrics.json");
    cmd->add_option("--config", f.config, "Config file with editor, oracle, budgets and context sections");
}

int do_run(const RunFlags& f, bool baseline, std::ostream& out) {
    RunSetup s = setup(f);
    const Repository repo = load_repo(f.repo);
    const SeedSet seeds = load_seeds(read_json(f.seeds), repo);
    const RunResult r = baseline ? oracle_guided_repair(repo, seeds, *s.oracle, *s.editor, s.options)
                                 : plan_and_execute(repo, seeds, *s.oracle, *s.editor, s.options);

    const fs::path dir = f.out;
    fs::remove_all(dir / "predicted");
    fs::remove_all(dir / "prompts");
    write_repository(r.repo, dir / "predicted");
    write_text(dir / "trace.jsonl", r.trace_jsonl());
    for (std::size_t i = 0; i < r.prompts.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "step-%04zu.txt", i + 1);
        write_text(dir / "prompts" / name, r.prompts[i]);
    }
    write_text(dir / "plan.json", r.plan.to_json().dump(2) + "\n");

    nlohmann::json summary = {{"driver", baseline ? "baseline" : "codeplan"},
                              {"editor", s.editor->name()},
                              {"oracle", s.oracle->name()},
                              {"steps", r.prompts.size()},
                              {"iterations", r.iterations},
                              {"edits", r.edits},
                              {"derived_edits", r.derived_edits},
                              {"validated", r.validated},
                              {"budget_exhausted", r.budget_exhausted},
                              {"generation_capped", r.generation_capped},
                              {"final_verdict", to_json(r.final_verdict)}};
    bool ok = r.validated;
    if (!f.target.empty()) {
        const MetricsReport m = evaluate(repo, load_repo(f.target), r.repo, s.oracle.get());
        write_text(dir / "metrics.json", to_json(m).dump(2) + "\n");
        summary["valid"] = m.valid;
        ok = m.valid;
        out << format_table(m, baseline ? "baseline" : "codeplan");
    }
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    out << (baseline ? "baseline" : "codeplan") << ": " << r.prompts.size() << " steps, " << r.iterations
        << " iteration(s), oracle " << (r.final_verdict.pass ? "pass" : "fail") << "; output in " << dir.string()
        << "\n";
    return ok ? kExitOk : kExitInvalid;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Repository-level edit planning"};
    app.name("codeplan");
    app.require_subcommand(1);

    std::string analyze_repo, analyze_out = ".";
    auto* analyze = app.add_subcommand("analyze", "Write blocks.json and graph.json for a repository");
    analyze->add_option("repo", analyze_repo, "Repository directory")->required();
    analyze->add_option("-o,--out", analyze_out, "Output directory");

    RunFlags run_flags, base_flags;
    add_run_flags(app.add_subcommand("run", "Plan and execute edits from seeds"), run_flags);
    add_run_flags(app.add_subcommand("baseline", "Seed edits, then repair what the oracle flags"), base_flags);

    std::string src, tgt, pred, eval_oracle = "internal", eval_cmd, eval_json;
    bool eval_strict = false, eval_no_oracle = false;
    auto* eval = app.add_subcommand("eval", "Compare a predicted repository with the ground truth");
    eval->add_option("--source", src, "Original repository")->required();
    eval->add_option("--target", tgt, "Ground-truth repository")->required();
    eval->add_option("--predicted", pred, "Predicted repository")->required();
    eval->add_option("--oracle", eval_oracle, "internal or command")->check(CLI::IsMember({"internal", "command"}));
    eval->add_option("--oracle-cmd", eval_cmd, "Checker command; {repo} is the workspace");
    eval->add_flag("--strict", eval_strict, "Strict internal oracle");
    eval->add_flag("--no-oracle", eval_no_oracle, "Validity from the ground truth alone");
    eval->add_option("--json", eval_json, "Also write the report to this file");

    auto* fixtures = app.add_subcommand("fixtures", "Built-in scenarios");
    fixtures->require_subcommand(1);
    auto* list = fixtures->add_subcommand("list", "Print scenario names");
    std::string fx_name, fx_dir = ".";
    auto* mat = fixtures->add_subcommand("materialize", "Write a scenario to disk");
    mat->add_option("name", fx_name, "Scenario name")->required();
    mat->add_option("--dir", fx_dir, "Parent directory");

    std::vector<std::string> argv_store = {"codeplan"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*analyze) {
            const Repository r = load_repo(analyze_repo);
            const DependencyGraph g = construct_dependency_graph(r);
            write_text(fs::path(analyze_out) / "blocks.json", blocks_to_json(r).dump(2) + "\n");
            write_text(fs::path(analyze_out) / "graph.json", g.to_json().dump(2) + "\n");
            for (const auto& e : r.parse_errors()) err << e.file << ":" << e.line << ": " << e.message << "\n";
            for (const auto& w : g.warnings()) err << "warning: " << w << "\n";
            out << r.block_count() << " blocks, " << g.edges().size() << " edges\n";
            return kExitOk;
        }
        if (app.got_subcommand("run")) return do_run(run_flags, false, out);
        if (app.got_subcommand("baseline")) return do_run(base_flags, true, out);
        if (*eval) {
            std::unique_ptr<Oracle> oracle;
            if (!eval_no_oracle) oracle = make_oracle(eval_oracle, eval_strict, eval_cmd, nlohmann::json::object());
            const MetricsReport m = evaluate(load_repo(src), load_repo(tgt), load_repo(pred), oracle.get());
            const std::string j = to_json(m).dump(2) + "\n";
            if (!eval_json.empty()) write_text(eval_json, j);
            out << j << format_table(m, fs::path(pred).filename().string());
            return m.valid ? kExitOk : kExitInvalid;
        }
        if (*list) {
            for (const auto& n : scenario_names()) out << n << "\n";
            return kExitOk;
        }
        if (*mat) {
            out << materialize_scenario(fx_name, fx_dir).string() << "\n";
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NotFoundError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: malformed input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInfra;
    }
    return kExitUsage;
}

} // namespace codeplan

#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "codeplan/seeds.hpp"
#include "codeplan/syntax.hpp"

namespace codeplan {

struct Diagnostic {
    std::string file;  // repository-relative; empty for whole-repository failures
    int line_start = 0;
    int line_end = 0;
    std::string message;

    auto operator<=>(const Diagnostic&) const = default;
};

struct OracleVerdict {
    bool pass = true;
    std::vector<Diagnostic> diagnostics;
};

nlohmann::json to_json(const Diagnostic& d);
nlohmann::json to_json(const OracleVerdict& v);

class Oracle {
public:
    virtual ~Oracle() = default;
    virtual OracleVerdict check(const Repository& repo) = 0;
    virtual std::string name() const = 0;
};

// Name, attribute and call-arity checks over the analyzed subset. Strict mode
// also reports calls that leave a defaulted parameter out.
OracleVerdict internal_checker(const Repository& repo, bool strict = false);

class InternalOracle : public Oracle {
public:
    explicit InternalOracle(bool strict = false) : strict_(strict) {}
    OracleVerdict check(const Repository& repo) override { return internal_checker(repo, strict_); }
    std::string name() const override { return strict_ ? "internal-strict" : "internal"; }

private:
    bool strict_;
};

struct CommandOracleConfig {
    std::string command;  // "{repo}" is replaced by the materialized workspace
    enum class Format { Regex, Json } format = Format::Regex;
    // Named groups (?<file>..), (?<line>..), (?<message>..); (?P<name>..) also accepted.
    std::string pattern = R"((?<file>[^:\s]+):(?<line>\d+):\s*(?:error:\s*)?(?<message>.*))";
    std::chrono::seconds timeout{120};
};

// Runs an external checker on a temporary copy of the repository.
// OracleInfraError when the command cannot run or times out.
class CommandOracle : public Oracle {
public:
    explicit CommandOracle(CommandOracleConfig config);
    OracleVerdict check(const Repository& repo) override;
    std::string name() const override { return "command"; }

private:
    CommandOracleConfig config_;
};

// Parses checker output; exposed for tests. workspace is stripped from
// reported paths.
std::vector<Diagnostic> parse_diagnostics(const std::string& output, const CommandOracleConfig& config,
                                          const std::string& workspace);

// Maps every diagnostic to the smallest block containing its first line and
// merges diagnostics per block. Diagnostics without a file are dropped.
std::vector<EditSpecification> diagnostics_to_seeds(const OracleVerdict& verdict, const Repository& repo);

} // namespace codeplan

#include "codeplan/errors.hpp"
#include "codeplan/oracle.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

namespace codeplan {

namespace {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "codeplan-oracle-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw OracleInfraError("cannot create oracle workspace");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

struct CommandResult {
    int status = 0;
    std::string output;
};

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

CommandResult run_command(const std::string& command, const fs::path& cwd, std::chrono::seconds timeout) {
    int fds[2];
    if (pipe(fds) != 0) throw OracleInfraError("pipe failed");
    const pid_t pid = fork();
    if (pid < 0) throw OracleInfraError("fork failed");
    if (pid == 0) {
        setpgid(0, 0);
        dup2(fds[1], STDOUT_FILENO);
        dup2(fds[1], STDERR_FILENO);
        close(fds[0]);
        close(fds[1]);
        if (chdir(cwd.c_str()) != 0) _exit(126);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(fds[1]);
    CommandResult r;
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    char buf[4096];
    for (;;) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            kill(-pid, SIGKILL);
            waitpid(pid, nullptr, 0);
            close(fds[0]);
            throw OracleInfraError("oracle command timed out after " + std::to_string(timeout.count()) + "s");
        }
        pollfd p{fds[0], POLLIN, 0};
        if (poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000))) <= 0) continue;
        const ssize_t n = read(fds[0], buf, sizeof buf);
        if (n <= 0) break;
        r.output.append(buf, static_cast<std::size_t>(n));
    }
    close(fds[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    r.status = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return r;
}

// std::regex has no named groups: strip the names and remember which
// capture index each one got.
std::regex compile_named(const std::string& pattern, std::map<std::string, std::size_t>& groups) {
    std::string plain;
    std::size_t index = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const char c = pattern[i];
        if (c == '\\' && i + 1 < pattern.size()) {
            plain += pattern.substr(i, 2);
            ++i;
            continue;
        }
        if (c == '(') {
            if (pattern.compare(i, 3, "(?<") == 0 || pattern.compare(i, 4, "(?P<") == 0) {
                const std::size_t open = pattern.find('<', i);
                const std::size_t close = pattern.find('>', open);
                if (close == std::string::npos) throw ConfigError("bad named group in oracle pattern");
                groups[pattern.substr(open + 1, close - open - 1)] = ++index;
                plain += '(';
                i = close;
                continue;
            }
            if (pattern.compare(i, 2, "(?") != 0) ++index;
        }
        plain += c;
    }
    for (const char* need : {"file", "line", "message"})
        if (!groups.count(need)) throw ConfigError(std::string("oracle pattern lacks a '") + need + "' group");
    try {
        return std::regex(plain);
    } catch (const std::regex_error& e) {
        throw ConfigError(std::string("bad oracle pattern: ") + e.what());
    }
}

std::string relative_to(std::string path, const std::string& workspace) {
    if (!workspace.empty() && path.rfind(workspace, 0) == 0) {
        path.erase(0, workspace.size());
        while (!path.empty() && path.front() == '/') path.erase(0, 1);
    }
    if (path.rfind("./", 0) == 0) path.erase(0, 2);
    return path;
}

} // namespace

std::vector<Diagnostic> parse_diagnostics(const std::string& output, const CommandOracleConfig& config,
                                          const std::string& workspace) {
    std::vector<Diagnostic> out;
    if (config.format == CommandOracleConfig::Format::Json) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(output);
        } catch (const nlohmann::json::exception& e) {
            throw OracleInfraError(std::string("oracle output is not JSON: ") + e.what());
        }
        // Either a plain list or a pyright-style report.
        const nlohmann::json& list = doc.is_array() ? doc : doc.value("generalDiagnostics", nlohmann::json::array());
        for (const auto& d : list) {
            if (d.value("severity", std::string("error")) != "error") continue;
            Diagnostic x;
            x.file = relative_to(d.value("file", std::string()), workspace);
            if (d.contains("range")) {
                x.line_start = d["range"]["start"].value("line", 0) + 1;
                x.line_end = d["range"]["end"].value("line", x.line_start - 1) + 1;
            } else {
                x.line_start = d.value("line", 0);
                x.line_end = d.value("line_end", x.line_start);
            }
            x.message = d.value("message", std::string());
            out.push_back(std::move(x));
        }
        return out;
    }
    std::map<std::string, std::size_t> groups;
    const std::regex re = compile_named(config.pattern, groups);
    std::istringstream in(output);
    for (std::string line; std::getline(in, line);) {
        std::smatch m;
        if (!std::regex_search(line, m, re)) continue;
        Diagnostic d;
        d.file = relative_to(m[groups["file"]].str(), workspace);
        d.line_start = d.line_end = std::atoi(m[groups["line"]].str().c_str());
        d.message = m[groups["message"]].str();
        out.push_back(std::move(d));
    }
    return out;
}

CommandOracle::CommandOracle(CommandOracleConfig config) : config_(std::move(config)) {
    if (config_.command.empty()) throw ConfigError("command oracle needs a command");
    if (config_.format == CommandOracleConfig::Format::Regex) {
        std::map<std::string, std::size_t> groups;
        compile_named(config_.pattern, groups);
    }
}

OracleVerdict CommandOracle::check(const Repository& repo) {
    TempDir ws;
    for (const auto& [path, text] : repo.sources()) {
        const fs::path p = ws.path() / path;
        fs::create_directories(p.parent_path());
        std::ofstream(p, std::ios::binary) << text;
    }
    std::string cmd = config_.command;
    for (std::size_t at; (at = cmd.find("{repo}")) != std::string::npos;)
        cmd.replace(at, 6, shell_quote(ws.path().string()));
    const CommandResult r = run_command(cmd, ws.path(), config_.timeout);
    if (r.status == 127) throw OracleInfraError("oracle command not found: " + config_.command);

    OracleVerdict v;
    v.diagnostics = parse_diagnostics(r.output, config_, ws.path().string());
    if (v.diagnostics.empty() && r.status != 0)
        v.diagnostics.push_back({"", 0, 0, "oracle command exited with status " + std::to_string(r.status)});
    v.pass = v.diagnostics.empty();
    return v;
}

} // namespace codeplan

#include "codeplan/errors.hpp"
#include "codeplan/fixtures.hpp"

#include <fstream>
#include <set>

namespace codeplan {

namespace fs = std::filesystem;

namespace {

Repository subtree(const Scenario& s, const std::string& prefix) {
    std::map<std::string, std::string> files;
    for (const auto& [p, text] : s.files)
        if (p.rfind(prefix, 0) == 0) files[p.substr(prefix.size())] = text;
    return Repository::from_sources(files);
}

} // namespace

Repository Scenario::source() const { return subtree(*this, "source/"); }
Repository Scenario::target() const { return subtree(*this, "target/"); }

nlohmann::json Scenario::json(const std::string& path) const {
    auto it = files.find(path);
    if (it == files.end()) throw NotFoundError("scenario " + name + " has no " + path);
    return nlohmann::json::parse(it->second);
}

std::vector<std::string> scenario_names() {
    std::set<std::string> names;
    for (const detail::EmbeddedFile* f = detail::kEmbeddedFixtures; f->path; ++f) {
        const std::string p = f->path;
        const std::size_t cut = p.find('/');
        if (cut != std::string::npos) names.insert(p.substr(0, cut));
    }
    return {names.begin(), names.end()};
}

Scenario load_scenario(const std::string& name) {
    Scenario s;
    s.name = name;
    const std::string prefix = name + "/";
    for (const detail::EmbeddedFile* f = detail::kEmbeddedFixtures; f->path; ++f) {
        const std::string p = f->path;
        if (p.rfind(prefix, 0) == 0) s.files[p.substr(prefix.size())] = std::string(f->data, f->size);
    }
    if (s.files.empty()) throw NotFoundError("no such scenario: " + name);
    return s;
}

std::unique_ptr<Editor> scenario_editor(const Scenario& s) {
    if (s.has("rules.json")) return std::make_unique<RuleEditor>(RuleEditor::from_json(s.json("rules.json")));
    if (s.has("replay.json")) return std::make_unique<ReplayEditor>(ReplayEditor::from_json(s.json("replay.json")));
    throw NotFoundError("scenario " + s.name + " has no editor document");
}

fs::path materialize_scenario(const std::string& name, const fs::path& dir) {
    const Scenario s = load_scenario(name);
    const fs::path root = dir / name;
    for (const auto& [p, text] : s.files) {
        const fs::path out = root / p;
        fs::create_directories(out.parent_path());
        std::ofstream f(out, std::ios::binary);
        if (!f) throw IoError("cannot write " + out.string());
        f << text;
    }
    return root;
}

} // namespace codeplan

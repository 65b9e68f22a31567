#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "codeplan/editors.hpp"
#include "codeplan/syntax.hpp"

namespace codeplan {

namespace detail {
struct EmbeddedFile {
    const char* path;
    const char* data;
    std::size_t size;
};
// Terminated by an entry with a null path.
extern const EmbeddedFile kEmbeddedFixtures[];
} // namespace detail

// One bundled scenario: source/ and target/ trees plus its JSON documents.
struct Scenario {
    std::string name;
    std::map<std::string, std::string> files;  // path relative to the scenario root

    Repository source() const;
    Repository target() const;
    bool has(const std::string& path) const { return files.count(path) > 0; }
    nlohmann::json json(const std::string& path) const;  // NotFoundError when absent
};

std::vector<std::string> scenario_names();
Scenario load_scenario(const std::string& name);
// The scenario's own editor: rules.json or replay.json.
std::unique_ptr<Editor> scenario_editor(const Scenario& s);
// Writes the scenario tree under dir/<name>; returns that directory.
std::filesystem::path materialize_scenario(const std::string& name, const std::filesystem::path& dir);

} // namespace codeplan

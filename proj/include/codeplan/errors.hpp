#pragma once

#include <stdexcept>
#include <string>

namespace codeplan {

// Source text outside the demo subset. Carries the first offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string file, int line, const std::string& message)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
          file_(std::move(file)), line_(line), message_(message) {}

    const std::string& file() const { return file_; }
    int line() const { return line_; }
    const std::string& detail() const { return message_; }

private:
    std::string file_;
    int line_;
    std::string message_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An edited fragment could not be placed back into the repository.
class MergeRejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The dependency graph and the change classifier disagree about what exists.
class InconsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EditorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The oracle itself could not run (missing command, timeout). Never a verdict.
class OracleInfraError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace codeplan

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tpdareach {

// Malformed automaton: undeclared names, bad intervals, generator misuse.
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string &what) : std::runtime_error(what) {}
    ModelError(const std::string &summary, std::vector<std::string> details)
        : std::runtime_error(summary), details_(std::move(details)) {}

    const std::vector<std::string> &details() const noexcept { return details_; }

private:
    std::vector<std::string> details_;
};

// Argument outside an operation's domain (negative value, empty interval, ...).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string &what) : std::runtime_error(what) {}
};

// An internal consistency check failed.
class InvariantViolation : public std::logic_error {
public:
    explicit InvariantViolation(const std::string &what) : std::logic_error(what) {}
};

} // namespace tpdareach

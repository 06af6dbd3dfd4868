#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dtrace {

// Each error class maps to one CLI exit status.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct CapExceeded : Error {
    using Error::Error;
};

/// An identity that must hold by construction failed to hold.
struct InvariantBreach : Error {
    using Error::Error;
};

/// Request outside an operation's domain (degree out of range, dimension
/// mismatch, unsupported coefficient ring, ...).
struct DomainError : Error {
    using Error::Error;
};

struct ValidationReport {
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
    void fail(std::string message) { failures.push_back(std::move(message)); }
    void merge(const ValidationReport& other, const std::string& prefix = {})
    {
        for (const auto& f : other.failures)
            failures.push_back(prefix + f);
    }
    std::string summary(std::size_t max_lines = 10) const;
};

}  // namespace dtrace

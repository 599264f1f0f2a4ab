#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tamc {

/// 1-based half-open-by-column source range; end >= start.
struct SourceSpan {
    std::string file;
    int line_start = 1;
    int col_start = 1;
    int line_end = 1;
    int col_end = 1;

    std::string str() const {
        return file + ":" + std::to_string(line_start) + ":" + std::to_string(col_start);
    }
};

enum class Severity { Error, Warning, Info };

/// A single validation/parsing finding. `address` names the model element
/// (edge address, location, channel) when no source text is involved.
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    std::optional<SourceSpan> span;
    std::optional<std::string> address;

    std::string str() const {
        std::string s;
        switch (severity) {
            case Severity::Error: s = "error: "; break;
            case Severity::Warning: s = "warning: "; break;
            case Severity::Info: s = "info: "; break;
        }
        if (span) s = span->str() + ": " + s;
        s += message;
        if (address) s += " [" + *address + "]";
        return s;
    }
};

inline bool has_errors(const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds)
        if (d.severity == Severity::Error) return true;
    return false;
}

/// Error kinds map onto CLI exit codes: Usage/Parse/Prerequisite/Address/
/// Containment/Shape -> 2, Resource -> 3, Internal -> 2 with a loud message.
enum class ErrorKind {
    Usage,
    Parse,
    Prerequisite,
    Address,
    Containment,
    Shape,
    Resource,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}
    Error(ErrorKind kind, std::string message, SourceSpan span)
        : std::runtime_error(span.str() + ": " + message), kind_(kind), span_(std::move(span)) {}

    ErrorKind kind() const { return kind_; }
    const std::optional<SourceSpan>& span() const { return span_; }

private:
    ErrorKind kind_;
    std::optional<SourceSpan> span_;
};

}  // namespace tamc

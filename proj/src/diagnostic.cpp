#include "tmkit/diagnostic.hpp"

#include <algorithm>
#include <cctype>

namespace tmkit {

bool is_valid_code(std::string_view code) {
    return code.size() == 6 && code.substr(0, 2) == "TM" &&
           std::all_of(code.begin() + 2, code.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

bool has_errors(std::span<const Diagnostic> diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string format_diagnostic(const Diagnostic& d, bool color) {
    std::string sev = d.severity == Severity::Error ? "error" : "warning";
    if (color) sev = (d.severity == Severity::Error ? "\x1b[31m" : "\x1b[33m") + sev + "\x1b[0m";
    return d.span.file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) +
           ": " + sev + " " + d.code + ": " + d.message;
}

}  // namespace tmkit

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tmkit/behavior.hpp"
#include "tmkit/core_model.hpp"
#include "tmkit/dynamics.hpp"

namespace tmkit {

enum class ExportFormat { GraphDescription, StructuredTrace, TableCSV };

inline constexpr std::string_view kTraceVersion = "tm-trace/1";

// Canonical `.tm` text; parse_model(serialize_model(m)) == m for models whose
// thimacs and actions were declared in containment pre-order (every parsed
// model is).
std::string serialize_model(const StaticModel& model);

// Dot-compatible digraph: thimacs as nested clusters, flows solid, positive
// triggers dashed, negative triggers bold black.
std::string export_static(const StaticModel& model);

// export_static plus a slot label and one dashed box per Actual event region.
std::string export_dynamic(const StaticModel& model, const SlotState& state);

std::string export_behavior(const BehaviorGraph& graph, const Trace& trace);

std::string export_table_csv(const PATable& table);
std::string format_table(const PATable& table);  // aligned text grid

std::string save_trace(const Trace& trace);

class TraceFormatError : public std::runtime_error {
public:
    TraceFormatError(const std::string& what, std::string position)
        : std::runtime_error(what + " at " + position), position_(std::move(position)) {}

    // Byte offset for syntax errors, JSON pointer for schema errors.
    const std::string& position() const noexcept { return position_; }

private:
    std::string position_;
};

Trace load_trace(std::string_view text);

}  // namespace tmkit

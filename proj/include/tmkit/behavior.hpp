#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tmkit/dynamics.hpp"

namespace tmkit {

// A maximal run of Actual slots for one event.
struct Occurrence {
    EventId event;
    int start = 1;
    int end = 1;  // inclusive

    int length() const { return end - start + 1; }
    bool covers(int slot) const { return start <= slot && slot <= end; }
    bool operator==(const Occurrence&) const = default;
};

enum class EdgeKind { Causal, Chronological };

struct BehaviorEdge {
    std::size_t src = 0;  // index into BehaviorGraph::nodes
    std::size_t dst = 0;
    EdgeKind kind = EdgeKind::Causal;
    std::optional<Firing> firing;  // set for causal edges

    bool operator==(const BehaviorEdge&) const = default;
};

// Causal edges come from firings: a positive firing links the source
// occurrence to the occurrence it started, a negative one to the occurrence it
// ended. Chronological edges link an occurrence that nothing caused to every
// occurrence ending in the slot just before it starts.
struct BehaviorGraph {
    std::vector<Occurrence> nodes;  // ordered by (start, event)
    std::vector<BehaviorEdge> edges;

    bool operator==(const BehaviorGraph&) const = default;
};

struct PATable {
    std::vector<std::string> events;           // row names, declaration order
    std::vector<std::vector<PAState>> cells;   // cells[row][slot - 1]

    int horizon() const { return cells.empty() ? 0 : static_cast<int>(cells.front().size()); }
    std::string row_glyphs(std::size_t row) const;
    bool operator==(const PATable&) const = default;
};

std::vector<Occurrence> derive_occurrences(const Trace& trace);
BehaviorGraph derive_behavior(const Trace& trace);
PATable emit_pa_table(const Trace& trace);

// Recovers occurrences from the table alone; equals derive_occurrences on the
// trace the table came from.
std::vector<Occurrence> occurrences_from_table(const PATable& table);

// "NE3" for event "E3"; other names are wrapped as "NE(name)".
std::string negative_event_name(const std::string& event_name);

}  // namespace tmkit

#include "tmkit/behavior.hpp"

#include <algorithm>

namespace tmkit {

namespace {

std::vector<Occurrence> runs(const std::vector<std::vector<PAState>>& rows) {
    std::vector<Occurrence> out;
    for (std::size_t e = 0; e < rows.size(); ++e) {
        const auto& row = rows[e];
        std::size_t t = 0;
        while (t < row.size()) {
            if (row[t] != PAState::Actual) {
                ++t;
                continue;
            }
            std::size_t end = t;
            while (end + 1 < row.size() && row[end + 1] == PAState::Actual) ++end;
            out.push_back(Occurrence{EventId{static_cast<std::uint32_t>(e)}, static_cast<int>(t) + 1,
                                     static_cast<int>(end) + 1});
            t = end + 1;
        }
    }
    std::sort(out.begin(), out.end(), [](const Occurrence& a, const Occurrence& b) {
        return a.start != b.start ? a.start < b.start : a.event < b.event;
    });
    return out;
}

}  // namespace

std::string PATable::row_glyphs(std::size_t row) const {
    std::string s;
    for (PAState c : cells.at(row)) s.push_back(glyph(c));
    return s;
}

PATable emit_pa_table(const Trace& trace) {
    PATable table;
    for (const TraceEvent& e : trace.events) table.events.push_back(e.name);
    table.cells.assign(trace.events.size(), std::vector<PAState>(trace.slots.size(), PAState::Potential));
    for (std::size_t t = 0; t < trace.slots.size(); ++t) {
        for (std::size_t e = 0; e < trace.events.size(); ++e) {
            table.cells[e][t] = trace.slots[t].assignment.at(e);
        }
    }
    return table;
}

std::vector<Occurrence> occurrences_from_table(const PATable& table) { return runs(table.cells); }

std::vector<Occurrence> derive_occurrences(const Trace& trace) { return runs(emit_pa_table(trace).cells); }

BehaviorGraph derive_behavior(const Trace& trace) {
    BehaviorGraph g;
    g.nodes = derive_occurrences(trace);

    auto find = [&](EventId e, auto&& pred) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            if (g.nodes[i].event == e && pred(g.nodes[i])) return i;
        }
        return std::nullopt;
    };

    std::vector<bool> caused(g.nodes.size(), false);
    for (const Firing& f : trace.firings) {
        auto src = find(f.src_event, [&](const Occurrence& o) { return o.covers(f.slot); });
        auto dst = f.polarity == Polarity::Positive
                       ? find(f.dst_event, [&](const Occurrence& o) { return o.start == f.slot + 1; })
                       : find(f.dst_event, [&](const Occurrence& o) { return o.end == f.slot; });
        if (!src || !dst) continue;
        g.edges.push_back(BehaviorEdge{*src, *dst, EdgeKind::Causal, f});
        if (f.polarity == Polarity::Positive) caused[*dst] = true;
    }

    for (std::size_t d = 0; d < g.nodes.size(); ++d) {
        if (caused[d] || g.nodes[d].start == 1) continue;
        for (std::size_t s = 0; s < g.nodes.size(); ++s) {
            if (g.nodes[s].end + 1 == g.nodes[d].start) {
                g.edges.push_back(BehaviorEdge{s, d, EdgeKind::Chronological, std::nullopt});
            }
        }
    }
    return g;
}

std::string negative_event_name(const std::string& event_name) {
    bool numbered = event_name.size() > 1 && event_name[0] == 'E' &&
                    std::all_of(event_name.begin() + 1, event_name.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (numbered) return "N" + event_name;
    return "NE(" + event_name + ")";
}

}  // namespace tmkit

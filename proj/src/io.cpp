#include "tmkit/io.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lexer.hpp"
#include "tmkit/dsl.hpp"

namespace tmkit {

namespace {

using nlohmann::json;

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string name_token(std::string_view s) {
    return detail::is_identifier(s) ? std::string(s) : quote(s);
}

std::string indent(int depth) { return std::string(static_cast<std::size_t>(depth) * 2, ' '); }

// ---------------------------------------------------------------------------
// DSL writer

void write_thimac(std::ostringstream& os, const StaticModel& m, ThimacId id, int depth) {
    const Thimac& t = m.thimac(id);
    os << indent(depth) << "thimac " << t.name;
    if (t.members.empty()) {
        os << "\n";
        return;
    }
    os << " {\n";
    for (const auto& member : t.members) {
        if (const auto* a = std::get_if<ActionId>(&member)) {
            const ActionNode& n = m.action(*a);
            os << indent(depth + 1) << "action " << to_string(n.kind);
            if (!n.label.empty()) os << ":" << name_token(n.label);
            os << "\n";
        } else {
            write_thimac(os, m, std::get<ThimacId>(member), depth + 1);
        }
    }
    os << indent(depth) << "}\n";
}

std::string arc_keyword(const Arc& a) {
    if (a.arc_class == ArcClass::Flow) return "flow";
    return a.polarity == Polarity::Negative ? "negtrigger" : "trigger";
}

// ---------------------------------------------------------------------------
// DOT writer

std::string dot_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string node_id(ActionId a) { return "\"a" + std::to_string(a.value) + "\""; }

void dot_thimac(std::ostringstream& os, const StaticModel& m, ThimacId id, int depth) {
    const Thimac& t = m.thimac(id);
    os << indent(depth) << "subgraph \"cluster_t" << id.value << "\" {\n";
    os << indent(depth + 1) << "label=\"" << dot_escape(t.name) << "\";\n";
    for (const auto& member : t.members) {
        if (const auto* a = std::get_if<ActionId>(&member)) {
            const ActionNode& n = m.action(*a);
            std::string label(to_string(n.kind));
            if (!n.label.empty()) label += "\\n" + dot_escape(n.label);
            os << indent(depth + 1) << node_id(*a) << " [label=\"" << label << "\"];\n";
        } else {
            dot_thimac(os, m, std::get<ThimacId>(member), depth + 1);
        }
    }
    os << indent(depth) << "}\n";
}

std::string dot_model(const StaticModel& m, const SlotState* state) {
    std::ostringstream os;
    os << "digraph \"" << dot_escape(m.name()) << "\" {\n";
    os << "  graph [compound=true, rankdir=LR];\n";
    os << "  node [shape=box, fontsize=10];\n";
    if (state) os << "  label=\"" << dot_escape(m.name()) << " @ slot " << state->slot << "\";\n";
    for (ThimacId r : m.roots()) dot_thimac(os, m, r, 1);
    for (const Arc& a : m.arcs()) {
        os << "  " << node_id(a.src) << " -> " << node_id(a.dst);
        if (a.is_trigger()) {
            os << (a.polarity == Polarity::Negative ? " [style=bold, color=black, penwidth=2]"
                                                     : " [style=dashed]");
        }
        os << ";\n";
    }
    if (state) {
        for (const EventDef& e : m.events()) {
            if (e.id.index() >= state->assignment.size() || !state->actual(e.id)) continue;
            os << "  subgraph \"cluster_event_" << e.id.value << "\" {\n";
            os << "    label=\"" << dot_escape(e.name) << "\";\n";
            os << "    style=dashed;\n";
            os << "    color=red;\n";
            for (ActionId n : e.region.nodes) os << "    " << node_id(n) << ";\n";
            os << "  }\n";
        }
    }
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Trace JSON

json names_where(const Trace& trace, const std::vector<bool>& flags) {
    json out = json::array();
    for (std::size_t i = 0; i < flags.size() && i < trace.events.size(); ++i) {
        if (flags[i]) out.push_back(trace.events[i].name);
    }
    return out;
}

class TraceReader {
public:
    explicit TraceReader(const json& root) : root_(root) {}

    Trace read() {
        require_object(root_, "");
        if (field(root_, "", "version", json::value_t::string).get<std::string>() != kTraceVersion) {
            fail("unsupported trace version", "/version");
        }
        Trace t;
        t.model_name = field(root_, "", "model", json::value_t::string).get<std::string>();
        t.scenario_name = field(root_, "", "scenario", json::value_t::string).get<std::string>();

        const json& events = field(root_, "", "events", json::value_t::array);
        for (std::size_t i = 0; i < events.size(); ++i) {
            std::string at = "/events/" + std::to_string(i);
            require_object(events[i], at);
            TraceEvent e;
            e.name = field(events[i], at, "name", json::value_t::string).get<std::string>();
            e.label = field(events[i], at, "label", json::value_t::string).get<std::string>();
            std::string kind = field(events[i], at, "kind", json::value_t::string).get<std::string>();
            if (kind == "event") {
                e.kind = EventKind::Event;
            } else if (kind == "instance") {
                e.kind = EventKind::Instance;
            } else {
                fail("unknown event kind '" + kind + "'", at + "/kind");
            }
            if (index_.count(e.name)) fail("duplicate event name '" + e.name + "'", at + "/name");
            index_[e.name] = EventId{static_cast<std::uint32_t>(i)};
            t.events.push_back(std::move(e));
        }

        const json& horizon_j = field(root_, "", "horizon", json::value_t::number_unsigned);
        const json& slots = field(root_, "", "slots", json::value_t::array);
        if (horizon_j.get<std::size_t>() != slots.size()) fail("horizon does not match slot count", "/horizon");
        for (std::size_t i = 0; i < slots.size(); ++i) {
            std::string at = "/slots/" + std::to_string(i);
            require_object(slots[i], at);
            SlotState s;
            s.slot = field(slots[i], at, "slot", json::value_t::number_unsigned).get<int>();
            if (s.slot != static_cast<int>(i) + 1) fail("slots must be contiguous from 1", at + "/slot");
            s.assignment.assign(t.events.size(), PAState::Potential);
            s.persists.assign(t.events.size(), false);
            for (EventId e : event_list(slots[i], at, "actual")) s.assignment[e.index()] = PAState::Actual;
            for (EventId e : event_list(slots[i], at, "persists")) s.persists[e.index()] = true;
            t.slots.push_back(std::move(s));
        }

        const json& firings = field(root_, "", "firings", json::value_t::array);
        for (std::size_t i = 0; i < firings.size(); ++i) {
            std::string at = "/firings/" + std::to_string(i);
            require_object(firings[i], at);
            Firing f;
            f.slot = field(firings[i], at, "slot", json::value_t::number_unsigned).get<int>();
            f.arc = ArcId{field(firings[i], at, "arc", json::value_t::number_unsigned).get<std::uint32_t>()};
            f.src_event = event_ref(field(firings[i], at, "src", json::value_t::string), at + "/src");
            f.dst_event = event_ref(field(firings[i], at, "dst", json::value_t::string), at + "/dst");
            std::string pol = field(firings[i], at, "polarity", json::value_t::string).get<std::string>();
            if (pol == "positive") {
                f.polarity = Polarity::Positive;
            } else if (pol == "negative") {
                f.polarity = Polarity::Negative;
            } else {
                fail("unknown polarity '" + pol + "'", at + "/polarity");
            }
            f.alias = field(firings[i], at, "alias", json::value_t::string).get<std::string>();
            t.firings.push_back(std::move(f));
        }
        return t;
    }

private:
    [[noreturn]] static void fail(const std::string& what, const std::string& pointer) {
        throw TraceFormatError("malformed trace: " + what, pointer.empty() ? "/" : pointer);
    }

    static void require_object(const json& j, const std::string& at) {
        if (!j.is_object()) fail("expected an object", at);
    }

    static const json& field(const json& obj, const std::string& at, const char* key, json::value_t type) {
        auto it = obj.find(key);
        if (it == obj.end()) fail(std::string("missing field '") + key + "'", at + "/" + key);
        bool ok = it->type() == type ||
                  (type == json::value_t::number_unsigned && it->type() == json::value_t::number_integer &&
                   it->get<long long>() >= 0);
        if (!ok) fail(std::string("field '") + key + "' has the wrong type", at + "/" + key);
        return *it;
    }

    EventId event_ref(const json& j, const std::string& at) const {
        auto it = index_.find(j.get<std::string>());
        if (it == index_.end()) fail("unknown event '" + j.get<std::string>() + "'", at);
        return it->second;
    }

    std::vector<EventId> event_list(const json& obj, const std::string& at, const char* key) const {
        const json& arr = field(obj, at, key, json::value_t::array);
        std::vector<EventId> out;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string p = at + "/" + key + "/" + std::to_string(i);
            if (!arr[i].is_string()) fail("expected an event name", p);
            out.push_back(event_ref(arr[i], p));
        }
        return out;
    }

    const json& root_;
    std::map<std::string, EventId> index_;
};

}  // namespace

std::string serialize_model(const StaticModel& m) {
    std::ostringstream os;
    os << "model " << name_token(m.name()) << "\n";
    if (!m.thimacs().empty()) os << "\n";
    for (ThimacId r : m.roots()) write_thimac(os, m, r, 0);

    if (!m.arcs().empty()) os << "\n";
    for (const Arc& a : m.arcs()) {
        os << arc_keyword(a) << " " << format_path(m, a.src) << " -> " << format_path(m, a.dst);
        for (const LiftOverride& o : m.lift_overrides()) {
            if (o.arc == a.id) os << " lifts to " << m.event(o.src).name << " -> " << m.event(o.dst).name;
        }
        os << "\n";
    }

    if (!m.events().empty()) os << "\n";
    for (const EventDef& e : m.events()) {
        os << (e.kind == EventKind::Instance ? "instance " : "event ") << e.name;
        if (!e.label.empty()) os << " " << quote(e.label);
        std::vector<ArcId> excluded;
        for (ArcId a : m.induced_arcs(e.region.nodes)) {
            if (!e.region.contains(a)) excluded.push_back(a);
        }
        os << " {\n";
        for (std::size_t i = 0; i < e.region.nodes.size(); ++i) {
            os << "  " << format_path(m, e.region.nodes[i]) << (i + 1 < e.region.nodes.size() ? "," : "") << "\n";
        }
        for (ArcId id : excluded) {
            const Arc& a = m.arc(id);
            os << "  without " << arc_keyword(a) << " " << format_path(m, a.src) << " -> "
               << format_path(m, a.dst) << "\n";
        }
        os << "}\n";
    }

    if (!m.negative_aliases().empty()) os << "\n";
    for (const NegativeAlias& a : m.negative_aliases()) {
        os << "ne " << a.name;
        if (!a.label.empty()) os << " " << quote(a.label);
        os << " = neg(" << m.event(a.src).name << " -> " << m.event(a.dst).name << ")\n";
    }
    return os.str();
}

std::string export_static(const StaticModel& model) { return dot_model(model, nullptr); }

std::string export_dynamic(const StaticModel& model, const SlotState& state) {
    return dot_model(model, &state);
}

std::string export_behavior(const BehaviorGraph& graph, const Trace& trace) {
    auto event_name = [&](EventId e) {
        return e.index() < trace.events.size() ? trace.events[e.index()].name : "#" + std::to_string(e.value);
    };
    std::ostringstream os;
    os << "digraph \"behavior\" {\n";
    if (!graph.nodes.empty()) os << "  node [shape=box, style=rounded];\n";
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const Occurrence& o = graph.nodes[i];
        os << "  \"o" << i << "\" [label=\"" << dot_escape(event_name(o.event)) << " [" << o.start << ","
           << o.end << "]\"];\n";
    }
    for (const BehaviorEdge& e : graph.edges) {
        os << "  \"o" << e.src << "\" -> \"o" << e.dst << "\"";
        if (e.kind == EdgeKind::Chronological) {
            os << " [style=dotted]";
        } else if (e.firing->polarity == Polarity::Negative) {
            std::string ne = negative_event_name(event_name(e.firing->dst_event));
            std::string label = e.firing->alias.empty() ? ne : e.firing->alias + " (" + ne + ")";
            os << " [label=\"" << dot_escape(label) << " @" << e.firing->slot << "\", style=bold]";
        } else {
            os << " [label=\"@" << e.firing->slot << "\"]";
        }
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

std::string export_table_csv(const PATable& table) {
    std::ostringstream os;
    os << "event";
    for (int t = 1; t <= table.horizon(); ++t) os << "," << t;
    os << "\n";
    for (std::size_t r = 0; r < table.events.size(); ++r) {
        os << table.events[r];
        for (PAState c : table.cells[r]) os << "," << glyph(c);
        os << "\n";
    }
    return os.str();
}

std::string format_table(const PATable& table) {
    std::size_t width = std::string_view("event").size();
    for (const auto& e : table.events) width = std::max(width, e.size());
    std::size_t cell = std::to_string(std::max(table.horizon(), 1)).size();

    std::ostringstream os;
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
    };
    std::string header = pad("event", width);
    for (int t = 1; t <= table.horizon(); ++t) header += " " + pad(std::to_string(t), cell);
    while (!header.empty() && header.back() == ' ') header.pop_back();
    os << header << "\n";
    for (std::size_t r = 0; r < table.events.size(); ++r) {
        std::string line = pad(table.events[r], width);
        for (PAState c : table.cells[r]) line += " " + pad(std::string(1, glyph(c)), cell);
        while (!line.empty() && line.back() == ' ') line.pop_back();
        os << line << "\n";
    }
    return os.str();
}

std::string save_trace(const Trace& trace) {
    json root;
    root["version"] = kTraceVersion;
    root["model"] = trace.model_name;
    root["scenario"] = trace.scenario_name;
    root["horizon"] = trace.slots.size();
    root["events"] = json::array();
    for (const TraceEvent& e : trace.events) {
        root["events"].push_back({{"name", e.name}, {"label", e.label}, {"kind", to_string(e.kind)}});
    }
    root["slots"] = json::array();
    for (const SlotState& s : trace.slots) {
        std::vector<bool> actual(s.assignment.size());
        for (std::size_t i = 0; i < s.assignment.size(); ++i) actual[i] = s.assignment[i] == PAState::Actual;
        root["slots"].push_back(
            {{"slot", s.slot}, {"actual", names_where(trace, actual)}, {"persists", names_where(trace, s.persists)}});
    }
    root["firings"] = json::array();
    for (const Firing& f : trace.firings) {
        root["firings"].push_back({{"slot", f.slot},
                                   {"arc", f.arc.value},
                                   {"src", trace.events.at(f.src_event.index()).name},
                                   {"dst", trace.events.at(f.dst_event.index()).name},
                                   {"polarity", to_string(f.polarity)},
                                   {"alias", f.alias}});
    }
    return root.dump(2) + "\n";
}

Trace load_trace(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw TraceFormatError(std::string("malformed trace: ") + e.what(), "byte " + std::to_string(e.byte));
    }
    return TraceReader(root).read();
}

}  // namespace tmkit

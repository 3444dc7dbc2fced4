#pragma once

#include <algorithm>
#include <bit>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmkit/dsl.hpp"
#include "tmkit/dynamics.hpp"

#ifndef TMKIT_FIXTURE_DIR
#error "TMKIT_FIXTURE_DIR must be defined"
#endif

namespace tmtest {

using namespace tmkit;

inline std::string fixture_path(const std::string& name) { return std::string(TMKIT_FIXTURE_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string read_fixture(const std::string& name) { return read_text(fixture_path(name)); }

inline StaticModel load_model(const std::string& name) {
    ModelParse p = parse_model(read_fixture(name), fixture_path(name));
    if (!p.ok()) {
        std::string msg = "fixture " + name + " failed to parse";
        for (const auto& d : p.diagnostics) msg += "\n  " + d.message;
        throw std::runtime_error(msg);
    }
    return *p.model;
}

inline ScenarioScript load_scenario(const StaticModel& model, const std::string& name) {
    ScenarioParse p = parse_scenario(read_fixture(name), model, fixture_path(name));
    if (!p.ok()) throw std::runtime_error("scenario " + name + " failed to parse");
    return *p.script;
}

inline Trace run_fixture(const std::string& model_name, const std::string& scenario_name) {
    StaticModel m = load_model(model_name);
    return run_scenario(m, load_scenario(m, scenario_name));
}

inline EventId event_id(const StaticModel& m, const std::string& name) {
    auto e = m.find_event(name);
    if (!e) throw std::runtime_error("no event " + name);
    return *e;
}

inline std::string row(const Trace& t, const std::string& event) {
    for (std::size_t i = 0; i < t.events.size(); ++i) {
        if (t.events[i].name != event) continue;
        std::string s;
        for (const SlotState& slot : t.slots) s.push_back(slot.assignment[i] == PAState::Actual ? '+' : '-');
        return s;
    }
    throw std::runtime_error("no event " + event);
}

// Firing rendered as "slot:src>dst" for positive and "slot:src!dst" for
// negative firings, with "=alias" appended when set.
inline std::vector<std::string> firing_log(const Trace& t) {
    std::vector<std::string> out;
    for (const Firing& f : t.firings) {
        std::string s = std::to_string(f.slot) + ":" + t.events[f.src_event.index()].name +
                        (f.polarity == Polarity::Positive ? ">" : "!") + t.events[f.dst_event.index()].name;
        if (!f.alias.empty()) s += "=" + f.alias;
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Region oracle: every node subset, kept when small enough and connected by
// its induced arcs (direction ignored).

inline std::vector<std::vector<std::uint32_t>> oracle_regions(const StaticModel& m, int max_nodes) {
    const std::size_t n = m.actions().size();
    if (n > 24) throw std::runtime_error("oracle limited to 24 nodes");
    std::vector<std::vector<std::uint32_t>> out;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        if (std::popcount(mask) > max_nodes) continue;
        std::vector<std::uint32_t> nodes;
        for (std::uint32_t i = 0; i < n; ++i) {
            if (mask & (std::uint64_t{1} << i)) nodes.push_back(i);
        }
        std::uint64_t seen = std::uint64_t{1} << nodes.front();
        bool grew = true;
        while (grew) {
            grew = false;
            for (const Arc& a : m.arcs()) {
                std::uint64_t s = std::uint64_t{1} << a.src.value, d = std::uint64_t{1} << a.dst.value;
                if (!(mask & s) || !(mask & d)) continue;
                if ((seen & s) && !(seen & d)) {
                    seen |= d;
                    grew = true;
                } else if ((seen & d) && !(seen & s)) {
                    seen |= s;
                    grew = true;
                }
            }
        }
        if (seen == mask) out.push_back(nodes);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Reference simulator written straight from the step rules, sharing nothing
// with the engine beyond the model accessors.

struct RefState {
    std::vector<int> actual;   // 0 or 1
    std::vector<int> persist;  // 0 or 1
};

inline std::vector<RefState> reference_run(const StaticModel& m, const ScenarioScript& sc) {
    const std::size_t ne = m.events().size();
    struct Link {
        std::size_t src, dst;
        bool negative;
    };
    std::vector<Link> links;
    for (const Arc& a : m.arcs()) {
        if (!a.is_trigger()) continue;
        std::vector<std::size_t> s, d;
        for (const EventDef& e : m.events()) {
            if (std::find(e.region.nodes.begin(), e.region.nodes.end(), a.src) != e.region.nodes.end())
                s.push_back(e.id.index());
            if (std::find(e.region.nodes.begin(), e.region.nodes.end(), a.dst) != e.region.nodes.end())
                d.push_back(e.id.index());
        }
        if (s.size() == 1 && d.size() == 1) links.push_back({s[0], d[0], a.polarity == Polarity::Negative});
    }
    auto apply = [&](RefState& st, int slot) {
        for (const Directive& dir : sc.directives) {
            if (dir.slot != slot) continue;
            std::size_t i = dir.event.index();
            if (dir.verb == Verb::Actualize) {
                st.actual[i] = 1;
                if (dir.persist || m.event(dir.event).kind == EventKind::Instance) st.persist[i] = 1;
            } else {
                st.actual[i] = 0;
                st.persist[i] = 0;
            }
        }
    };
    std::vector<RefState> out;
    if (sc.slots < 1) return out;
    RefState st{std::vector<int>(ne, 0), std::vector<int>(ne, 0)};
    apply(st, 1);
    out.push_back(st);
    for (int t = 2; t <= sc.slots; ++t) {
        const RefState& cur = out.back();
        RefState nx = cur;
        for (std::size_t i = 0; i < ne; ++i) {
            if (!nx.persist[i]) nx.actual[i] = 0;
        }
        for (const Link& l : links) {
            if (!l.negative && cur.actual[l.src]) {
                nx.actual[l.dst] = 1;
                if (m.event(EventId{static_cast<std::uint32_t>(l.dst)}).kind == EventKind::Instance)
                    nx.persist[l.dst] = 1;
            }
        }
        apply(nx, t);
        for (const Link& l : links) {
            if (l.negative && cur.actual[l.src]) {
                nx.actual[l.dst] = 0;
                nx.persist[l.dst] = 0;
            }
        }
        out.push_back(nx);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random models. Flows follow a hand-written copy of the adjacency table,
// events are disjoint so lifting is never ambiguous.

inline bool table_allows(ActionKind s, ActionKind d) {
    using K = ActionKind;
    static const std::vector<std::pair<K, K>> allowed = {
        {K::Create, K::Process},   {K::Create, K::Release},    {K::Receive, K::Process},
        {K::Receive, K::Release},  {K::Process, K::Release},   {K::Process, K::Create},
        {K::Release, K::Transfer}, {K::Transfer, K::Transfer}, {K::Transfer, K::Receive}};
    return std::find(allowed.begin(), allowed.end(), std::make_pair(s, d)) != allowed.end();
}

struct RandomCase {
    StaticModel model;
    ScenarioScript scenario;
};

inline RandomCase random_case(std::mt19937& rng) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    StaticModel m("random");
    const int thimacs = pick(1, 5);
    std::vector<ThimacId> ts;
    for (int i = 0; i < thimacs; ++i) {
        std::optional<ThimacId> parent;
        if (i > 0 && pick(0, 2) == 0) parent = ts[static_cast<std::size_t>(pick(0, i - 1))];
        ts.push_back(m.add_thimac("T" + std::to_string(i), parent));
    }
    for (ThimacId t : ts) {
        for (ActionKind k : kActionKinds) {
            if (pick(0, 2) != 0) m.add_action(t, k);
        }
    }
    if (m.actions().empty()) m.add_action(ts.front(), ActionKind::Create);
    const int n = static_cast<int>(m.actions().size());

    for (int i = 0, flows = pick(0, n); i < flows; ++i) {
        ActionId s{static_cast<std::uint32_t>(pick(0, n - 1))}, d{static_cast<std::uint32_t>(pick(0, n - 1))};
        const ActionNode& a = m.action(s);
        const ActionNode& b = m.action(d);
        bool ok = table_allows(a.kind, b.kind) && s != d &&
                  !(a.kind == ActionKind::Transfer && b.kind == ActionKind::Transfer && a.owner == b.owner);
        if (ok) m.connect(s, d, ArcClass::Flow);
    }
    for (int i = 0, triggers = pick(0, 2 * n); i < triggers; ++i) {
        ActionId s{static_cast<std::uint32_t>(pick(0, n - 1))}, d{static_cast<std::uint32_t>(pick(0, n - 1))};
        if (s == d) continue;
        m.connect(s, d, ArcClass::Trigger, pick(0, 3) == 0 ? Polarity::Negative : Polarity::Positive);
    }

    // Disjoint events over a shuffled node list.
    std::vector<std::uint32_t> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(i);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t at = 0;
    int events = 0;
    while (at < order.size() && events < 8) {
        if (pick(0, 4) == 0) {
            ++at;  // leave a node outside every event
            continue;
        }
        std::size_t size = std::min<std::size_t>(static_cast<std::size_t>(pick(1, 3)), order.size() - at);
        std::vector<ActionId> nodes;
        for (std::size_t k = 0; k < size; ++k) nodes.push_back(ActionId{order[at + k]});
        at += size;
        m.define_induced_event("E" + std::to_string(events + 1), "", nodes,
                               pick(0, 5) == 0 ? EventKind::Instance : EventKind::Event);
        ++events;
    }
    m.freeze();

    ScenarioScript sc;
    sc.name = "random";
    sc.slots = pick(1, 12);
    if (!m.events().empty()) {
        for (int i = 0, count = pick(0, 6); i < count; ++i) {
            Directive d;
            d.slot = pick(1, sc.slots);
            d.event = EventId{static_cast<std::uint32_t>(pick(0, static_cast<int>(m.events().size()) - 1))};
            d.verb = pick(0, 2) == 0 ? Verb::Potentialize : Verb::Actualize;
            d.persist = d.verb == Verb::Actualize && pick(0, 1) == 0;
            sc.directives.push_back(d);
        }
    }
    std::stable_sort(sc.directives.begin(), sc.directives.end(),
                     [](const Directive& a, const Directive& b) { return a.slot < b.slot; });
    return {std::move(m), std::move(sc)};
}

}  // namespace tmtest

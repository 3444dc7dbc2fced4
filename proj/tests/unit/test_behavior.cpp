#include <doctest.h>

#include "support.hpp"
#include "tmkit/behavior.hpp"

using namespace tmkit;
using tmtest::load_model;
using tmtest::run_fixture;

namespace {

std::string name(const Trace& t, const BehaviorGraph& g, std::size_t node) {
    const Occurrence& o = g.nodes[node];
    return t.events[o.event.index()].name + "[" + std::to_string(o.start) + "," + std::to_string(o.end) + "]";
}

std::vector<std::string> edges(const Trace& t, const BehaviorGraph& g) {
    std::vector<std::string> out;
    for (const BehaviorEdge& e : g.edges) {
        std::string s = name(t, g, e.src) + (e.kind == EdgeKind::Chronological ? " .. " : " -> ") + name(t, g, e.dst);
        if (e.firing && e.firing->polarity == Polarity::Negative) s += " x";
        out.push_back(s);
    }
    return out;
}

void check_invariants(const Trace& t) {
    BehaviorGraph g = derive_behavior(t);
    PATable table = emit_pa_table(t);
    CHECK(occurrences_from_table(table) == derive_occurrences(t));

    int plus = 0, covered = 0;
    for (const auto& r : table.cells) {
        for (PAState c : r) plus += c == PAState::Actual;
    }
    for (const Occurrence& o : g.nodes) covered += o.length();
    CHECK(plus == covered);

    for (const BehaviorEdge& e : g.edges) {
        if (e.kind != EdgeKind::Causal) continue;
        REQUIRE(e.firing);
        CHECK(std::find(t.firings.begin(), t.firings.end(), *e.firing) != t.firings.end());
    }
    for (const Firing& f : t.firings) {
        if (f.polarity != Polarity::Negative) continue;
        const auto& r = table.cells[f.dst_event.index()];
        CHECK(r[static_cast<std::size_t>(f.slot - 1)] == PAState::Actual);
        CHECK(r[static_cast<std::size_t>(f.slot)] == PAState::Potential);
    }
}

}  // namespace

TEST_CASE("bulb table") {
    Trace t = run_fixture("bulb.tm", "bulb_on_off.tms");
    PATable table = emit_pa_table(t);
    CHECK(table.events == std::vector<std::string>{"E1", "E2", "E3"});
    CHECK(table.horizon() == 7);
    CHECK(table.row_glyphs(0) == "+++++++");
    CHECK(table.row_glyphs(1) == "-+++---");
    CHECK(table.row_glyphs(2) == "--+++--");
}

TEST_CASE("empty scenario table is all potential") {
    StaticModel m = load_model("bulb.tm");
    ScenarioScript sc{"empty", 3, {}};
    PATable table = emit_pa_table(run_scenario(m, sc));
    for (std::size_t r = 0; r < table.events.size(); ++r) CHECK(table.row_glyphs(r) == "---");
}

TEST_CASE("bulb behavior graph") {
    Trace t = run_fixture("bulb.tm", "bulb_on_off.tms");
    BehaviorGraph g = derive_behavior(t);
    CHECK(g.nodes.size() == 3);
    CHECK(edges(t, g) == std::vector<std::string>{"E2[2,4] -> E3[3,5]"});
    REQUIRE(g.edges[0].firing);
    CHECK(g.edges[0].firing->slot == 2);
}

TEST_CASE("microwave cook behavior") {
    Trace t = run_fixture("microwave.tm", "microwave_cook.tms");
    BehaviorGraph g = derive_behavior(t);
    CHECK(edges(t, g) == std::vector<std::string>{
                             "E2[2,2] -> E3[3,6]", "E3[3,6] -> E4[4,7]", "E3[3,6] -> E10[4,7]",
                             "E4[4,7] -> E5[5,8]", "E5[5,8] -> E6[6,9]", "E6[6,9] -> E3[3,6] x",
                             "E6[6,9] -> E13[7,10]", "E13[7,10] -> E14[8,11]"});
    bool timeout_beeper = false;
    for (const BehaviorEdge& e : g.edges) {
        if (e.firing && e.firing->alias == "E7") CHECK(e.firing->polarity == Polarity::Negative);
        if (name(t, g, e.src) == "E13[7,10]" && name(t, g, e.dst) == "E14[8,11]") timeout_beeper = true;
    }
    CHECK(timeout_beeper);
}

TEST_CASE("chronological edges fill uncaused starts") {
    Trace t = run_fixture("microwave.tm", "microwave_door.tms");
    BehaviorGraph g = derive_behavior(t);
    auto es = edges(t, g);
    CHECK(std::find(es.begin(), es.end(), "E8[4,8] .. E11[9,9]") != es.end());
    CHECK(std::find(es.begin(), es.end(), "E13[7,8] .. E11[9,9]") != es.end());
    CHECK(std::find(es.begin(), es.end(), "E11[9,9] -> E10[4,9] x") != es.end());
    // E8 starts at 4 without a cause; nothing ends at 3.
    for (const BehaviorEdge& e : g.edges) CHECK(name(t, g, e.dst) != "E8[4,8]");
}

TEST_CASE("single event trace") {
    StaticModel m = load_model("bulb.tm");
    ScenarioScript sc{"one", 4, {Directive{2, Verb::Actualize, EventId{0}, false}}};
    Trace t = run_scenario(m, sc);
    BehaviorGraph g = derive_behavior(t);
    REQUIRE(g.nodes.size() == 1);
    CHECK(g.nodes[0] == Occurrence{EventId{0}, 2, 4});
    CHECK(g.edges.empty());
}

TEST_CASE("occurrences") {
    Occurrence o{EventId{1}, 3, 5};
    CHECK(o.length() == 3);
    CHECK(o.covers(3));
    CHECK(o.covers(5));
    CHECK_FALSE(o.covers(6));

    PATable table;
    table.events = {"X", "Y"};
    auto A = PAState::Actual, P = PAState::Potential;
    table.cells = {{A, A, P, A}, {P, P, P, A}};
    auto occ = occurrences_from_table(table);
    REQUIRE(occ.size() == 3);
    CHECK(occ[0] == Occurrence{EventId{0}, 1, 2});
    CHECK(occ[1] == Occurrence{EventId{0}, 4, 4});
    CHECK(occ[2] == Occurrence{EventId{1}, 4, 4});
}

TEST_CASE("negative event names") {
    CHECK(negative_event_name("E3") == "NE3");
    CHECK(negative_event_name("E10") == "NE10");
    CHECK(negative_event_name("Heating") == "NE(Heating)");
    CHECK(negative_event_name("E") == "NE(E)");
    CHECK(negative_event_name("Ebb") == "NE(Ebb)");
}

TEST_CASE("graph invariants on fixture runs") {
    check_invariants(run_fixture("bulb.tm", "bulb_on_off.tms"));
    check_invariants(run_fixture("washing_machine.tm", "wash_cycle.tms"));
    check_invariants(run_fixture("microwave.tm", "microwave_cook.tms"));
    check_invariants(run_fixture("microwave.tm", "microwave_door.tms"));
    check_invariants(run_fixture("microwave.tm", "microwave_door_open_push.tms"));
}

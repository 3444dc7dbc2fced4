#include "tmkit/dynamics.hpp"

#include <algorithm>

namespace tmkit {

char glyph(PAState s) { return s == PAState::Actual ? '+' : '-'; }

EventTriggerLinks event_trigger_links(const StaticModel& model) {
    EventTriggerLinks out;
    auto owners = [&](ActionId node) {
        std::vector<EventId> found;
        for (const EventDef& e : model.events()) {
            if (e.region.contains(node)) found.push_back(e.id);
        }
        return found;
    };
    for (const Arc& arc : model.arcs()) {
        if (!arc.is_trigger()) continue;
        auto override_it = std::find_if(model.lift_overrides().begin(), model.lift_overrides().end(),
                                        [&](const LiftOverride& o) { return o.arc == arc.id; });
        if (override_it != model.lift_overrides().end()) {
            out.links.push_back(LiftedTrigger{arc.id, override_it->src, override_it->dst, arc.polarity});
            continue;
        }
        auto srcs = owners(arc.src);
        auto dsts = owners(arc.dst);
        if (srcs.empty() || dsts.empty()) {
            out.dormant.push_back(arc.id);
            continue;
        }
        if (srcs.size() > 1 || dsts.size() > 1) {
            const bool at_src = srcs.size() > 1;
            std::string names;
            for (EventId e : at_src ? srcs : dsts) names += (names.empty() ? "" : ", ") + model.event(e).name;
            throw DynamicsError(DynamicsErrc::AmbiguousLift,
                                "AmbiguousLift: trigger " + model.path_of(arc.src) + " -> " +
                                    model.path_of(arc.dst) + " has its " + (at_src ? "source" : "target") +
                                    " in several events (" + names + "); add a 'lifts to' annotation",
                                arc.id);
        }
        out.links.push_back(LiftedTrigger{arc.id, srcs.front(), dsts.front(), arc.polarity});
    }
    return out;
}

std::vector<Diagnostic> lift_diagnostics(const StaticModel& model, const SourceMap* spans) {
    auto span_of = [&](ArcId a) {
        if (spans && a.index() < spans->arcs.size()) return spans->arcs[a.index()];
        return SourceSpan{model.name(), 1, 1};
    };
    std::vector<Diagnostic> out;
    try {
        EventTriggerLinks links = event_trigger_links(model);
        for (ArcId a : links.dormant) {
            const Arc& arc = model.arc(a);
            out.push_back(Diagnostic{Severity::Warning, std::string(codes::kDormantTrigger),
                                     "trigger " + model.path_of(arc.src) + " -> " + model.path_of(arc.dst) +
                                         " has an endpoint outside every event and never fires",
                                     span_of(a)});
        }
    } catch (const DynamicsError& e) {
        SourceSpan where = e.arc() ? span_of(*e.arc()) : SourceSpan{model.name(), 1, 1};
        out.push_back(Diagnostic{Severity::Error, std::string(codes::kAmbiguousLift), e.what(), where});
    }
    return out;
}

SlotState initial_state(const StaticModel& model, int slot) {
    SlotState s;
    s.slot = slot;
    s.assignment.assign(model.events().size(), PAState::Potential);
    s.persists.assign(model.events().size(), false);
    return s;
}

Engine::Engine(const StaticModel& model) : Engine(model, event_trigger_links(model)) {}

Engine::Engine(const StaticModel& model, EventTriggerLinks links) : model_(model), links_(std::move(links)) {}

void Engine::apply_directives(SlotState& state, std::span<const Directive> directives) const {
    for (const Directive& d : directives) {
        const std::size_t i = d.event.index();
        if (d.verb == Verb::Actualize) {
            state.assignment.at(i) = PAState::Actual;
            if (d.persist || model_.event(d.event).kind == EventKind::Instance) state.persists[i] = true;
        } else {
            state.assignment.at(i) = PAState::Potential;
            state.persists[i] = false;
        }
    }
}

std::string Engine::alias_for(EventId src, EventId dst) const {
    for (const NegativeAlias& a : model_.negative_aliases()) {
        if (a.src == src && a.dst == dst) return a.name;
    }
    return {};
}

StepResult Engine::step(const SlotState& current, std::span<const Directive> directives) const {
    StepResult out;
    SlotState& next = out.next;
    next = current;
    next.slot = current.slot + 1;

    for (std::size_t i = 0; i < next.assignment.size(); ++i) {
        if (next.assignment[i] == PAState::Actual && !next.persists[i]) next.assignment[i] = PAState::Potential;
    }

    std::vector<const LiftedTrigger*> started;
    for (const LiftedTrigger& link : links_.links) {
        if (link.polarity != Polarity::Positive || !current.actual(link.src)) continue;
        next.assignment[link.dst.index()] = PAState::Actual;
        if (model_.event(link.dst).kind == EventKind::Instance) next.persists[link.dst.index()] = true;
        if (!current.actual(link.dst)) started.push_back(&link);
    }

    apply_directives(next, directives);

    std::vector<const LiftedTrigger*> stopped;
    for (const LiftedTrigger& link : links_.links) {
        if (link.polarity != Polarity::Negative || !current.actual(link.src)) continue;
        next.assignment[link.dst.index()] = PAState::Potential;
        next.persists[link.dst.index()] = false;
        if (current.actual(link.dst)) stopped.push_back(&link);
    }

    // A positive firing only counts when its transition survived directives
    // and negative triggers.
    std::vector<const LiftedTrigger*> fired;
    for (const LiftedTrigger* l : started) {
        if (next.actual(l->dst)) fired.push_back(l);
    }
    fired.insert(fired.end(), stopped.begin(), stopped.end());
    std::sort(fired.begin(), fired.end(),
              [](const LiftedTrigger* a, const LiftedTrigger* b) { return a->arc < b->arc; });
    for (const LiftedTrigger* l : fired) {
        out.firings.push_back(Firing{current.slot, l->arc, l->src, l->dst, l->polarity,
                                     l->polarity == Polarity::Negative ? alias_for(l->src, l->dst) : ""});
    }
    return out;
}

Trace Engine::run(const ScenarioScript& scenario) const {
    Trace trace;
    trace.model_name = model_.name();
    trace.scenario_name = scenario.name;
    for (const EventDef& e : model_.events()) trace.events.push_back(TraceEvent{e.name, e.label, e.kind});

    auto directives_at = [&](int slot) {
        auto lo = std::lower_bound(scenario.directives.begin(), scenario.directives.end(), slot,
                                   [](const Directive& d, int s) { return d.slot < s; });
        auto hi = std::upper_bound(lo, scenario.directives.end(), slot,
                                   [](int s, const Directive& d) { return s < d.slot; });
        return std::span<const Directive>(lo, hi);
    };

    if (scenario.slots < 1) return trace;
    SlotState state = initial_state(model_, 1);
    apply_directives(state, directives_at(1));
    trace.slots.push_back(state);
    for (int t = 1; t < scenario.slots; ++t) {
        StepResult r = step(trace.slots.back(), directives_at(t + 1));
        trace.firings.insert(trace.firings.end(), r.firings.begin(), r.firings.end());
        trace.slots.push_back(std::move(r.next));
    }
    return trace;
}

Trace run_scenario(const StaticModel& model, const ScenarioScript& scenario) {
    return Engine(model).run(scenario);
}

bool is_full_potentiality(const SlotState& state) {
    return std::all_of(state.assignment.begin(), state.assignment.end(),
                       [](PAState s) { return s == PAState::Potential; });
}

bool is_full_potentiality(const Trace& trace, int slot) {
    if (slot < 1 || slot > trace.horizon()) {
        throw DynamicsError(DynamicsErrc::SlotOutOfRange,
                            "SlotOutOfRange: slot " + std::to_string(slot) + " outside 1.." +
                                std::to_string(trace.horizon()));
    }
    return is_full_potentiality(trace.slots[static_cast<std::size_t>(slot - 1)]);
}

}  // namespace tmkit

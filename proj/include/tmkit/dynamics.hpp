#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmkit/core_model.hpp"
#include "tmkit/diagnostic.hpp"
#include "tmkit/dsl.hpp"

namespace tmkit {

// The only two states an event can occupy. There is deliberately no third
// value: stopping an event is the transition Actual -> Potential.
enum class PAState : std::uint8_t { Potential, Actual };

char glyph(PAState s);  // '-' or '+'

struct SlotState {
    int slot = 1;
    std::vector<PAState> assignment;  // indexed by EventId, total over events
    std::vector<bool> persists;       // same indexing

    bool actual(EventId e) const { return assignment.at(e.index()) == PAState::Actual; }
    bool operator==(const SlotState&) const = default;
};

struct Firing {
    int slot = 1;  // slot in which the source was Actual; the effect lands at slot + 1
    ArcId arc;
    EventId src_event;
    EventId dst_event;
    Polarity polarity = Polarity::Positive;
    std::string alias;  // NegativeAlias name when one matches, else empty

    bool operator==(const Firing&) const = default;
};

struct TraceEvent {
    std::string name;
    std::string label;
    EventKind kind = EventKind::Event;

    bool operator==(const TraceEvent&) const = default;
};

// A complete run. Carries the event table it was produced against so it can
// be saved, reloaded and analysed without the model.
struct Trace {
    std::string model_name;
    std::string scenario_name;
    std::vector<TraceEvent> events;
    std::vector<SlotState> slots;  // slots[i].slot == i + 1
    std::vector<Firing> firings;   // sorted by (slot, arc)

    int horizon() const { return static_cast<int>(slots.size()); }
    bool operator==(const Trace&) const = default;
};

struct LiftedTrigger {
    ArcId arc;
    EventId src;
    EventId dst;
    Polarity polarity = Polarity::Positive;

    bool operator==(const LiftedTrigger&) const = default;
};

struct EventTriggerLinks {
    std::vector<LiftedTrigger> links;  // in arc declaration order
    std::vector<ArcId> dormant;        // triggers with an endpoint in no event region
};

enum class DynamicsErrc { AmbiguousLift, SlotOutOfRange };

class DynamicsError : public std::runtime_error {
public:
    DynamicsError(DynamicsErrc code, const std::string& what, std::optional<ArcId> arc = std::nullopt)
        : std::runtime_error(what), code_(code), arc_(arc) {}
    DynamicsErrc code() const noexcept { return code_; }
    std::optional<ArcId> arc() const noexcept { return arc_; }  // the offending trigger, for AmbiguousLift

private:
    DynamicsErrc code_;
    std::optional<ArcId> arc_;
};

// Lifts node-level triggers to event level. An endpoint inside several
// regions needs a lift override, otherwise AmbiguousLift is thrown.
EventTriggerLinks event_trigger_links(const StaticModel& model);

// TM0301 warnings for dormant triggers, or one TM0302 error when lifting is
// ambiguous.
std::vector<Diagnostic> lift_diagnostics(const StaticModel& model, const SourceMap* spans = nullptr);

// Full potentiality: every event Potential, nothing persisting.
SlotState initial_state(const StaticModel& model, int slot = 1);

struct StepResult {
    SlotState next;
    std::vector<Firing> firings;
};

// Executes scenarios against one model. Holds a reference to the model, which
// must outlive the engine; never mutates it.
class Engine {
public:
    explicit Engine(const StaticModel& model);
    Engine(const StaticModel& model, EventTriggerLinks links);

    const StaticModel& model() const { return model_; }
    const EventTriggerLinks& links() const { return links_; }

    // One slot transition, in order: decay of non-persisting events, positive
    // triggers from `current`, this slot's directives, negative triggers from
    // `current`. Negative outcomes win.
    StepResult step(const SlotState& current, std::span<const Directive> directives) const;

    // Applies directives to a state in place (used for slot 1).
    void apply_directives(SlotState& state, std::span<const Directive> directives) const;

    Trace run(const ScenarioScript& scenario) const;

private:
    std::string alias_for(EventId src, EventId dst) const;

    const StaticModel& model_;
    EventTriggerLinks links_;
};

Trace run_scenario(const StaticModel& model, const ScenarioScript& scenario);

// Throws DynamicsError(SlotOutOfRange) unless 1 <= slot <= horizon.
bool is_full_potentiality(const Trace& trace, int slot);
bool is_full_potentiality(const SlotState& state);

}  // namespace tmkit

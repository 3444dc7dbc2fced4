#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tmkit/ids.hpp"

namespace tmkit {

// The five generic actions. Arrive and accept are folded into Receive.
enum class ActionKind : std::uint8_t { Create, Process, Release, Transfer, Receive };

inline constexpr std::array<ActionKind, 5> kActionKinds = {
    ActionKind::Create, ActionKind::Process, ActionKind::Release, ActionKind::Transfer,
    ActionKind::Receive};

std::string_view to_string(ActionKind kind);
std::optional<ActionKind> parse_action_kind(std::string_view keyword);

// Kind-level flow adjacency. Transfer -> Transfer is additionally required to
// cross a thimac boundary; see StaticModel::flow_legal.
bool flow_kinds_allowed(ActionKind src, ActionKind dst);

enum class ArcClass : std::uint8_t { Flow, Trigger };
enum class Polarity : std::uint8_t { Positive, Negative };
enum class EventKind : std::uint8_t { Event, Instance };

// Defer lets a caller store an illegal flow so the validator can report it.
enum class AdjacencyCheck : std::uint8_t { Enforce, Defer };

std::string_view to_string(ArcClass c);
std::string_view to_string(Polarity p);
std::string_view to_string(EventKind k);

struct Thimac {
    ThimacId id;
    std::string name;
    std::optional<ThimacId> parent;
    std::vector<ActionId> actions;
    std::vector<ThimacId> children;
    // Actions and child thimacs interleaved in insertion order.
    std::vector<std::variant<ThimacId, ActionId>> members;

    bool operator==(const Thimac&) const = default;
};

struct ActionNode {
    ActionId id;
    ThimacId owner;
    ActionKind kind = ActionKind::Create;
    std::string label;  // empty when unlabeled

    bool operator==(const ActionNode&) const = default;
};

struct Arc {
    ArcId id;
    ArcClass arc_class = ArcClass::Flow;
    ActionId src;
    ActionId dst;
    Polarity polarity = Polarity::Positive;

    bool is_trigger() const { return arc_class == ArcClass::Trigger; }
    bool operator==(const Arc&) const = default;
};

// A subdiagram of the static model. Both vectors are kept sorted and unique.
struct Region {
    std::vector<ActionId> nodes;
    std::vector<ArcId> arcs;

    bool contains(ActionId node) const;
    bool contains(ArcId arc) const;
    bool operator==(const Region&) const = default;
    auto operator<=>(const Region&) const = default;
};

struct EventDef {
    EventId id;
    std::string name;
    std::string label;
    Region region;
    EventKind kind = EventKind::Event;

    bool operator==(const EventDef&) const = default;
};

// Explicit event-level endpoints for a trigger whose endpoints lie in
// overlapping regions.
struct LiftOverride {
    ArcId arc;
    EventId src;
    EventId dst;

    bool operator==(const LiftOverride&) const = default;
};

// A report-level name for the potentialization of `dst` by `src` through a
// negative trigger, e.g. E7 = neg(E6 -> E3).
struct NegativeAlias {
    std::string name;
    std::string label;
    EventId src;
    EventId dst;

    bool operator==(const NegativeAlias&) const = default;
};

enum class ModelErrc {
    UnknownParent,
    DuplicateName,
    UnknownOwner,
    DuplicateAction,
    UnknownEndpoint,
    IllegalFlowAdjacency,
    SelfTrigger,
    EmptyRegion,
    DanglingArcEndpoint,
    UnknownNode,
    UnknownArc,
    UnknownEvent,
    Frozen,
};

std::string_view to_string(ModelErrc code);

class ModelError : public std::runtime_error {
public:
    ModelError(ModelErrc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ModelErrc code() const noexcept { return code_; }

private:
    ModelErrc code_;
};

// The timeless potentiality graph. Built single-threaded through the add_*
// members, then frozen; a frozen model rejects every mutation and can be
// shared between readers.
class StaticModel {
public:
    StaticModel() = default;
    explicit StaticModel(std::string name) : name_(std::move(name)) {}

    ThimacId add_thimac(std::string name, std::optional<ThimacId> parent = std::nullopt);
    ActionId add_action(ThimacId owner, ActionKind kind, std::string label = {});
    ArcId connect(ActionId src, ActionId dst, ArcClass arc_class,
                  Polarity polarity = Polarity::Positive,
                  AdjacencyCheck check = AdjacencyCheck::Enforce);
    EventId define_event(std::string name, std::string label, std::vector<ActionId> nodes,
                         std::vector<ArcId> arcs, EventKind kind);
    // Region arcs are every arc with both endpoints among `nodes`.
    EventId define_induced_event(std::string name, std::string label,
                                 std::vector<ActionId> nodes, EventKind kind);
    void add_lift_override(ArcId arc, EventId src, EventId dst);
    void add_negative_alias(NegativeAlias alias);

    void freeze() { frozen_ = true; }
    bool frozen() const { return frozen_; }

    const std::string& name() const { return name_; }
    void set_name(std::string name);

    const std::vector<Thimac>& thimacs() const { return thimacs_; }
    const std::vector<ActionNode>& actions() const { return actions_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    const std::vector<EventDef>& events() const { return events_; }
    const std::vector<LiftOverride>& lift_overrides() const { return lift_overrides_; }
    const std::vector<NegativeAlias>& negative_aliases() const { return negative_aliases_; }

    const Thimac& thimac(ThimacId id) const { return thimacs_.at(id.index()); }
    const ActionNode& action(ActionId id) const { return actions_.at(id.index()); }
    const Arc& arc(ArcId id) const { return arcs_.at(id.index()); }
    const EventDef& event(EventId id) const { return events_.at(id.index()); }

    std::vector<ThimacId> roots() const;
    std::optional<ThimacId> find_child(std::optional<ThimacId> parent, std::string_view name) const;
    std::optional<ActionId> find_action(ThimacId owner, ActionKind kind, std::string_view label) const;
    std::optional<EventId> find_event(std::string_view name) const;

    // Full flow legality including the boundary rule for Transfer -> Transfer.
    bool flow_legal(ActionId src, ActionId dst) const;

    std::vector<ArcId> induced_arcs(std::span<const ActionId> nodes) const;

    // Dotted containment path, e.g. "Oven.Heat" or "Oven.Heat.process:cook".
    std::string path_of(ThimacId id) const;
    std::string path_of(ActionId id) const;

    // Equality ignores the frozen flag.
    bool operator==(const StaticModel& other) const;

private:
    void require_mutable() const;
    bool has_thimac(ThimacId id) const { return id.index() < thimacs_.size(); }
    bool has_action(ActionId id) const { return id.index() < actions_.size(); }
    bool has_event(EventId id) const { return id.index() < events_.size(); }

    std::string name_;
    std::vector<Thimac> thimacs_;
    std::vector<ActionNode> actions_;
    std::vector<Arc> arcs_;
    std::vector<EventDef> events_;
    std::vector<LiftOverride> lift_overrides_;
    std::vector<NegativeAlias> negative_aliases_;
    bool frozen_ = false;
};

}  // namespace tmkit

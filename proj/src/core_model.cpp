#include "tmkit/core_model.hpp"

#include <algorithm>

namespace tmkit {

namespace {

template <class T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::Create: return "create";
        case ActionKind::Process: return "process";
        case ActionKind::Release: return "release";
        case ActionKind::Transfer: return "transfer";
        case ActionKind::Receive: return "receive";
    }
    return "?";
}

std::optional<ActionKind> parse_action_kind(std::string_view keyword) {
    for (ActionKind k : kActionKinds) {
        if (to_string(k) == keyword) return k;
    }
    return std::nullopt;
}

bool flow_kinds_allowed(ActionKind src, ActionKind dst) {
    using K = ActionKind;
    struct Pair {
        K src, dst;
    };
    static constexpr Pair kTable[] = {
        {K::Create, K::Process},   {K::Create, K::Release},    {K::Receive, K::Process},
        {K::Receive, K::Release},  {K::Process, K::Release},   {K::Process, K::Create},
        {K::Release, K::Transfer}, {K::Transfer, K::Transfer}, {K::Transfer, K::Receive},
    };
    return std::any_of(std::begin(kTable), std::end(kTable),
                       [&](const Pair& p) { return p.src == src && p.dst == dst; });
}

std::string_view to_string(ArcClass c) {
    return c == ArcClass::Flow ? "flow" : "trigger";
}

std::string_view to_string(Polarity p) {
    return p == Polarity::Positive ? "positive" : "negative";
}

std::string_view to_string(EventKind k) {
    return k == EventKind::Event ? "event" : "instance";
}

std::string_view to_string(ModelErrc code) {
    switch (code) {
        case ModelErrc::UnknownParent: return "UnknownParent";
        case ModelErrc::DuplicateName: return "DuplicateName";
        case ModelErrc::UnknownOwner: return "UnknownOwner";
        case ModelErrc::DuplicateAction: return "DuplicateAction";
        case ModelErrc::UnknownEndpoint: return "UnknownEndpoint";
        case ModelErrc::IllegalFlowAdjacency: return "IllegalFlowAdjacency";
        case ModelErrc::SelfTrigger: return "SelfTrigger";
        case ModelErrc::EmptyRegion: return "EmptyRegion";
        case ModelErrc::DanglingArcEndpoint: return "DanglingArcEndpoint";
        case ModelErrc::UnknownNode: return "UnknownNode";
        case ModelErrc::UnknownArc: return "UnknownArc";
        case ModelErrc::UnknownEvent: return "UnknownEvent";
        case ModelErrc::Frozen: return "Frozen";
    }
    return "?";
}

bool Region::contains(ActionId node) const {
    return std::binary_search(nodes.begin(), nodes.end(), node);
}

bool Region::contains(ArcId arc) const {
    return std::binary_search(arcs.begin(), arcs.end(), arc);
}

void StaticModel::require_mutable() const {
    if (frozen_) throw ModelError(ModelErrc::Frozen, "model '" + name_ + "' is frozen");
}

void StaticModel::set_name(std::string name) {
    require_mutable();
    name_ = std::move(name);
}

ThimacId StaticModel::add_thimac(std::string name, std::optional<ThimacId> parent) {
    require_mutable();
    if (parent && !has_thimac(*parent)) {
        throw ModelError(ModelErrc::UnknownParent,
                         "unknown parent thimac #" + std::to_string(parent->value));
    }
    if (find_child(parent, name)) {
        std::string where = parent ? " under '" + path_of(*parent) + "'" : "";
        throw ModelError(ModelErrc::DuplicateName,
                         "duplicate thimac '" + name + "'" + where);
    }
    ThimacId id{static_cast<std::uint32_t>(thimacs_.size())};
    Thimac t;
    t.id = id;
    t.name = std::move(name);
    t.parent = parent;
    thimacs_.push_back(std::move(t));
    if (parent) {
        Thimac& p = thimacs_[parent->index()];
        p.children.push_back(id);
        p.members.emplace_back(id);
    }
    return id;
}

ActionId StaticModel::add_action(ThimacId owner, ActionKind kind, std::string label) {
    require_mutable();
    if (!has_thimac(owner)) {
        throw ModelError(ModelErrc::UnknownOwner,
                         "unknown owner thimac #" + std::to_string(owner.value));
    }
    if (find_action(owner, kind, label)) {
        throw ModelError(ModelErrc::DuplicateAction,
                         "duplicate action " + path_of(owner) + "." + std::string(to_string(kind)) +
                             (label.empty() ? "" : ":" + label));
    }
    ActionId id{static_cast<std::uint32_t>(actions_.size())};
    actions_.push_back(ActionNode{.id = id, .owner = owner, .kind = kind, .label = std::move(label)});
    Thimac& t = thimacs_[owner.index()];
    t.actions.push_back(id);
    t.members.emplace_back(id);
    return id;
}

bool StaticModel::flow_legal(ActionId src, ActionId dst) const {
    const ActionNode& s = action(src);
    const ActionNode& d = action(dst);
    if (!flow_kinds_allowed(s.kind, d.kind)) return false;
    if (s.kind == ActionKind::Transfer && d.kind == ActionKind::Transfer) return s.owner != d.owner;
    return true;
}

ArcId StaticModel::connect(ActionId src, ActionId dst, ArcClass arc_class, Polarity polarity,
                           AdjacencyCheck check) {
    require_mutable();
    if (!has_action(src) || !has_action(dst)) {
        throw ModelError(ModelErrc::UnknownEndpoint, "arc endpoint does not exist");
    }
    if (arc_class == ArcClass::Flow) {
        if (polarity != Polarity::Positive) {
            throw ModelError(ModelErrc::IllegalFlowAdjacency, "flow arcs carry no polarity");
        }
        if (check == AdjacencyCheck::Enforce && !flow_legal(src, dst)) {
            throw ModelError(ModelErrc::IllegalFlowAdjacency,
                             "IllegalFlowAdjacency(" + std::string(to_string(action(src).kind)) + ", " +
                                 std::string(to_string(action(dst).kind)) + "): " + path_of(src) + " -> " +
                                 path_of(dst));
        }
    } else if (src == dst) {
        throw ModelError(ModelErrc::SelfTrigger, "trigger from " + path_of(src) + " to itself");
    }
    ArcId id{static_cast<std::uint32_t>(arcs_.size())};
    arcs_.push_back(Arc{.id = id, .arc_class = arc_class, .src = src, .dst = dst, .polarity = polarity});
    return id;
}

EventId StaticModel::define_event(std::string name, std::string label, std::vector<ActionId> nodes,
                                  std::vector<ArcId> arcs, EventKind kind) {
    require_mutable();
    if (nodes.empty()) throw ModelError(ModelErrc::EmptyRegion, "event '" + name + "' has no nodes");
    sort_unique(nodes);
    sort_unique(arcs);
    for (ActionId n : nodes) {
        if (!has_action(n)) {
            throw ModelError(ModelErrc::UnknownNode,
                             "event '" + name + "' names unknown node #" + std::to_string(n.value));
        }
    }
    for (ArcId a : arcs) {
        if (a.index() >= arcs_.size()) {
            throw ModelError(ModelErrc::UnknownArc,
                             "event '" + name + "' names unknown arc #" + std::to_string(a.value));
        }
        const Arc& arc = arcs_[a.index()];
        auto in = [&](ActionId n) { return std::binary_search(nodes.begin(), nodes.end(), n); };
        if (!in(arc.src) || !in(arc.dst)) {
            throw ModelError(ModelErrc::DanglingArcEndpoint,
                             "event '" + name + "' includes arc " + path_of(arc.src) + " -> " +
                                 path_of(arc.dst) + " without both endpoints");
        }
    }
    EventId id{static_cast<std::uint32_t>(events_.size())};
    events_.push_back(EventDef{.id = id,
                               .name = std::move(name),
                               .label = std::move(label),
                               .region = Region{std::move(nodes), std::move(arcs)},
                               .kind = kind});
    return id;
}

EventId StaticModel::define_induced_event(std::string name, std::string label,
                                          std::vector<ActionId> nodes, EventKind kind) {
    for (ActionId n : nodes) {
        if (!has_action(n)) {
            throw ModelError(ModelErrc::UnknownNode,
                             "event '" + name + "' names unknown node #" + std::to_string(n.value));
        }
    }
    auto arcs = induced_arcs(nodes);
    return define_event(std::move(name), std::move(label), std::move(nodes), std::move(arcs), kind);
}

void StaticModel::add_lift_override(ArcId arc, EventId src, EventId dst) {
    require_mutable();
    if (arc.index() >= arcs_.size()) throw ModelError(ModelErrc::UnknownArc, "unknown arc");
    if (!has_event(src) || !has_event(dst)) throw ModelError(ModelErrc::UnknownEvent, "unknown event");
    const Arc& a = arcs_[arc.index()];
    if (!a.is_trigger()) throw ModelError(ModelErrc::UnknownArc, "lift override on a flow arc");
    if (!event(src).region.contains(a.src) || !event(dst).region.contains(a.dst)) {
        throw ModelError(ModelErrc::DanglingArcEndpoint,
                         "lift override " + event(src).name + " -> " + event(dst).name +
                             " does not cover the trigger endpoints");
    }
    lift_overrides_.push_back(LiftOverride{arc, src, dst});
}

void StaticModel::add_negative_alias(NegativeAlias alias) {
    require_mutable();
    if (!has_event(alias.src) || !has_event(alias.dst)) {
        throw ModelError(ModelErrc::UnknownEvent, "negative alias '" + alias.name + "' names unknown event");
    }
    negative_aliases_.push_back(std::move(alias));
}

std::vector<ThimacId> StaticModel::roots() const {
    std::vector<ThimacId> out;
    for (const Thimac& t : thimacs_) {
        if (!t.parent) out.push_back(t.id);
    }
    return out;
}

std::optional<ThimacId> StaticModel::find_child(std::optional<ThimacId> parent,
                                                std::string_view name) const {
    if (parent) {
        for (ThimacId c : thimac(*parent).children) {
            if (thimacs_[c.index()].name == name) return c;
        }
        return std::nullopt;
    }
    for (const Thimac& t : thimacs_) {
        if (!t.parent && t.name == name) return t.id;
    }
    return std::nullopt;
}

std::optional<ActionId> StaticModel::find_action(ThimacId owner, ActionKind kind,
                                                 std::string_view label) const {
    for (ActionId a : thimac(owner).actions) {
        const ActionNode& n = actions_[a.index()];
        if (n.kind == kind && n.label == label) return a;
    }
    return std::nullopt;
}

std::optional<EventId> StaticModel::find_event(std::string_view name) const {
    for (const EventDef& e : events_) {
        if (e.name == name) return e.id;
    }
    return std::nullopt;
}

std::vector<ArcId> StaticModel::induced_arcs(std::span<const ActionId> nodes) const {
    std::vector<ActionId> sorted(nodes.begin(), nodes.end());
    sort_unique(sorted);
    auto in = [&](ActionId n) { return std::binary_search(sorted.begin(), sorted.end(), n); };
    std::vector<ArcId> out;
    for (const Arc& a : arcs_) {
        if (in(a.src) && in(a.dst)) out.push_back(a.id);
    }
    return out;
}

std::string StaticModel::path_of(ThimacId id) const {
    std::string path = thimac(id).name;
    std::optional<ThimacId> p = thimac(id).parent;
    // Bounded walk: a forest has at most size() ancestors.
    for (std::size_t guard = 0; p && guard < thimacs_.size(); ++guard) {
        path = thimac(*p).name + "." + path;
        p = thimac(*p).parent;
    }
    return path;
}

std::string StaticModel::path_of(ActionId id) const {
    const ActionNode& n = action(id);
    std::string path = path_of(n.owner) + "." + std::string(to_string(n.kind));
    if (!n.label.empty()) path += ":" + n.label;
    return path;
}

bool StaticModel::operator==(const StaticModel& other) const {
    return name_ == other.name_ && thimacs_ == other.thimacs_ && actions_ == other.actions_ &&
           arcs_ == other.arcs_ && events_ == other.events_ &&
           lift_overrides_ == other.lift_overrides_ && negative_aliases_ == other.negative_aliases_;
}

}  // namespace tmkit

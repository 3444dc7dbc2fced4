#include "tmkit/validator.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_set>

namespace tmkit {

namespace {

class Reporter {
public:
    Reporter(const StaticModel& model, const SourceMap* spans) : model_(model), spans_(spans) {}

    void add(Severity sev, std::string_view code, std::string msg, const SourceSpan& span) {
        diags_.push_back(Diagnostic{sev, std::string(code), std::move(msg), span});
    }

    SourceSpan fallback() const { return SourceSpan{model_.name().empty() ? "<model>" : model_.name(), 1, 1}; }

    SourceSpan at(const std::vector<SourceSpan>* table, std::size_t index) const {
        if (table && index < table->size()) return (*table)[index];
        return fallback();
    }
    SourceSpan thimac(ThimacId id) const { return at(spans_ ? &spans_->thimacs : nullptr, id.index()); }
    SourceSpan arc(ArcId id) const { return at(spans_ ? &spans_->arcs : nullptr, id.index()); }
    SourceSpan event(EventId id) const { return at(spans_ ? &spans_->events : nullptr, id.index()); }

    std::vector<Diagnostic> take() { return std::move(diags_); }

private:
    const StaticModel& model_;
    const SourceMap* spans_;
    std::vector<Diagnostic> diags_;
};

bool components_connected(std::span<const ActionId> nodes,
                          const std::function<void(ActionId, const std::function<void(ActionId)>&)>& neighbors) {
    if (nodes.empty()) return false;
    std::unordered_set<ActionId> members(nodes.begin(), nodes.end());
    std::unordered_set<ActionId> seen{nodes.front()};
    std::vector<ActionId> stack{nodes.front()};
    while (!stack.empty()) {
        ActionId n = stack.back();
        stack.pop_back();
        neighbors(n, [&](ActionId m) {
            if (members.count(m) && seen.insert(m).second) stack.push_back(m);
        });
    }
    return seen.size() == members.size();
}

}  // namespace

bool region_connected(const Region& region, const StaticModel& model) {
    return components_connected(region.nodes, [&](ActionId n, const std::function<void(ActionId)>& visit) {
        for (ArcId id : region.arcs) {
            const Arc& a = model.arc(id);
            if (a.src == n) visit(a.dst);
            if (a.dst == n) visit(a.src);
        }
    });
}

ValidationReport validate(const StaticModel& model, const ValidateOptions& options,
                          const SourceMap* spans) {
    Reporter r(model, spans);
    const Severity soft = options.strict ? Severity::Error : Severity::Warning;

    // V1
    for (const Thimac& t : model.thimacs()) {
        bool flowing = false;
        bool created = false;
        for (ActionId a : t.actions) {
            if (model.action(a).kind == ActionKind::Create) created = true;
        }
        bool transfer_in = false;
        for (const Arc& arc : model.arcs()) {
            if (arc.arc_class != ArcClass::Flow) continue;
            const ActionNode& s = model.action(arc.src);
            const ActionNode& d = model.action(arc.dst);
            if (d.owner == t.id && d.kind == ActionKind::Receive) flowing = true;
            if (s.owner == t.id && s.kind == ActionKind::Release) flowing = true;
            if (d.owner == t.id && d.kind == ActionKind::Transfer && s.owner != t.id) transfer_in = true;
        }
        if (flowing && !created && !transfer_in) {
            r.add(soft, codes::kNeverCreated,
                  "V1: thing never created: '" + model.path_of(t.id) +
                      "' flows but has no create action and no transfer from outside",
                  r.thimac(t.id));
        }
    }

    // V2
    for (const Arc& arc : model.arcs()) {
        if (arc.arc_class == ArcClass::Flow && !model.flow_legal(arc.src, arc.dst)) {
            r.add(Severity::Error, codes::kIllegalFlow,
                  "V2: IllegalFlowAdjacency(" + std::string(to_string(model.action(arc.src).kind)) + ", " +
                      std::string(to_string(model.action(arc.dst).kind)) + "): " + model.path_of(arc.src) +
                      " -> " + model.path_of(arc.dst),
                  r.arc(arc.id));
        }
    }

    // V3
    for (const Arc& arc : model.arcs()) {
        if (arc.is_trigger() && model.action(arc.src).owner == model.action(arc.dst).owner) {
            r.add(soft, codes::kIntraMachineTrigger,
                  "V3: trigger within one thimac: " + model.path_of(arc.src) + " -> " + model.path_of(arc.dst),
                  r.arc(arc.id));
        }
    }

    // V4
    for (const EventDef& e : model.events()) {
        const Region& reg = e.region;
        std::string problem;
        if (reg.nodes.empty()) {
            problem = "empty region";
        } else if (!std::is_sorted(reg.nodes.begin(), reg.nodes.end()) ||
                   std::adjacent_find(reg.nodes.begin(), reg.nodes.end()) != reg.nodes.end()) {
            problem = "region nodes are not a set";
        } else if (std::any_of(reg.nodes.begin(), reg.nodes.end(),
                               [&](ActionId n) { return n.index() >= model.actions().size(); })) {
            problem = "region names an unknown node";
        } else if (std::any_of(reg.arcs.begin(), reg.arcs.end(),
                               [&](ArcId a) { return a.index() >= model.arcs().size(); })) {
            problem = "region names an unknown arc";
        } else if (std::any_of(reg.arcs.begin(), reg.arcs.end(), [&](ArcId a) {
                       return !reg.contains(model.arc(a).src) || !reg.contains(model.arc(a).dst);
                   })) {
            problem = "region arc has an endpoint outside the region";
        } else if (!region_connected(reg, model)) {
            problem = "region is not connected";
        }
        if (!problem.empty()) {
            r.add(Severity::Error, codes::kMalformedRegion, "V4: event '" + e.name + "': " + problem,
                  r.event(e.id));
        }
    }

    // V5
    for (const Thimac& t : model.thimacs()) {
        std::optional<ThimacId> p = t.parent;
        std::size_t steps = 0;
        while (p && steps <= model.thimacs().size()) {
            if (*p == t.id) break;
            p = model.thimac(*p).parent;
            ++steps;
        }
        if (p) {
            r.add(Severity::Error, codes::kContainmentCycle,
                  "V5: containment cycle through thimac '" + t.name + "'", r.thimac(t.id));
        }
    }

    // V6
    std::set<std::string> seen;
    for (const EventDef& e : model.events()) {
        if (!seen.insert(e.name).second) {
            r.add(Severity::Error, codes::kEventIdentity, "V6: duplicate event id '" + e.name + "'",
                  r.event(e.id));
        }
        if (e.kind == EventKind::Instance) {
            bool has_create = std::any_of(e.region.nodes.begin(), e.region.nodes.end(), [&](ActionId n) {
                return n.index() < model.actions().size() && model.action(n).kind == ActionKind::Create;
            });
            if (!has_create) {
                r.add(Severity::Error, codes::kEventIdentity,
                      "V6: instance '" + e.name + "' asserts existence but its region has no create action",
                      r.event(e.id));
            }
        }
    }

    ValidationReport report;
    report.diagnostics = r.take();
    report.ok = !has_errors(report.diagnostics);
    return report;
}

std::vector<Region> enumerate_regions(const StaticModel& model, int max_nodes, std::size_t cap) {
    if (max_nodes < 1) throw std::invalid_argument("enumerate_regions: max_nodes must be at least 1");
    const std::size_t n = model.actions().size();
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const Arc& a : model.arcs()) {
        if (a.src == a.dst) continue;
        adj[a.src.index()].push_back(a.dst.value);
        adj[a.dst.index()].push_back(a.src.value);
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }

    // ESU: each connected set is grown once, from its smallest node, using
    // only exclusive neighbours larger than that root.
    std::vector<std::vector<std::uint32_t>> found;
    const auto k = static_cast<std::size_t>(max_nodes);
    std::vector<std::uint32_t> sub;
    std::vector<char> in_sub(n, 0), in_nbhd(n, 0);

    std::function<void(std::vector<std::uint32_t>, std::uint32_t)> extend =
        [&](std::vector<std::uint32_t> ext, std::uint32_t root) {
            std::vector<std::uint32_t> sorted = sub;
            std::sort(sorted.begin(), sorted.end());
            found.push_back(std::move(sorted));
            if (found.size() > cap) {
                throw RegionBudgetExceeded("enumerate_regions: more than " + std::to_string(cap) + " regions");
            }
            if (sub.size() == k) return;
            while (!ext.empty()) {
                std::uint32_t w = ext.back();
                ext.pop_back();
                std::vector<std::uint32_t> next_ext = ext;
                std::vector<std::uint32_t> added;
                for (std::uint32_t u : adj[w]) {
                    if (u > root && !in_sub[u] && !in_nbhd[u]) {
                        next_ext.push_back(u);
                        added.push_back(u);
                    }
                }
                // The neighbourhood of the grown set now includes w's neighbours.
                std::vector<std::uint32_t> marked;
                for (std::uint32_t u : adj[w]) {
                    if (!in_nbhd[u]) {
                        in_nbhd[u] = 1;
                        marked.push_back(u);
                    }
                }
                sub.push_back(w);
                in_sub[w] = 1;
                extend(std::move(next_ext), root);
                in_sub[w] = 0;
                sub.pop_back();
                for (std::uint32_t u : marked) in_nbhd[u] = 0;
            }
        };

    for (std::uint32_t v = 0; v < n; ++v) {
        sub = {v};
        in_sub[v] = 1;
        std::vector<std::uint32_t> marked{v};
        in_nbhd[v] = 1;
        std::vector<std::uint32_t> ext;
        for (std::uint32_t u : adj[v]) {
            if (!in_nbhd[u]) {
                in_nbhd[u] = 1;
                marked.push_back(u);
            }
            if (u > v) ext.push_back(u);
        }
        extend(std::move(ext), v);
        in_sub[v] = 0;
        for (std::uint32_t u : marked) in_nbhd[u] = 0;
    }

    std::sort(found.begin(), found.end());
    std::vector<Region> out;
    out.reserve(found.size());
    for (const auto& ids : found) {
        Region reg;
        for (std::uint32_t id : ids) reg.nodes.push_back(ActionId{id});
        reg.arcs = model.induced_arcs(reg.nodes);
        out.push_back(std::move(reg));
    }
    return out;
}

}  // namespace tmkit

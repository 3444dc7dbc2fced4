#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tmkit/core_model.hpp"
#include "tmkit/diagnostic.hpp"

namespace tmkit {

// Declaration spans for a parsed model, indexed like the model collections.
struct SourceMap {
    std::vector<SourceSpan> thimacs;
    std::vector<SourceSpan> actions;
    std::vector<SourceSpan> arcs;
    std::vector<SourceSpan> events;
};

struct ModelParse {
    std::optional<StaticModel> model;  // frozen; empty when any error was reported
    std::vector<Diagnostic> diagnostics;
    SourceMap spans;

    bool ok() const { return model.has_value(); }
};

// Parses a `.tm` model file. `origin` names the file in spans and supplies the
// model name when the text has no `model` declaration.
ModelParse parse_model(std::string_view text, std::string_view origin);

enum class Verb { Actualize, Potentialize };

std::string_view to_string(Verb v);

struct Directive {
    int slot = 1;
    Verb verb = Verb::Actualize;
    EventId event;
    bool persist = false;

    bool operator==(const Directive&) const = default;
};

struct ScenarioScript {
    std::string name;
    int slots = 1;
    std::vector<Directive> directives;  // sorted by slot, file order within a slot

    bool operator==(const ScenarioScript&) const = default;
};

struct ScenarioParse {
    std::optional<ScenarioScript> script;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return script.has_value(); }
};

// Parses a `.tms` scenario against `model`. A `slots_override` replaces the
// horizon declared in the text before directive bounds are checked.
ScenarioParse parse_scenario(std::string_view text, const StaticModel& model,
                             std::string_view origin = "<scenario>",
                             std::optional<int> slots_override = std::nullopt);

// Resolves `Thimac(.Sub)*.kind[:label]`. Without a label the unlabeled node
// wins; otherwise a single node of that kind is required.
std::variant<ActionId, Diagnostic> resolve_path(const StaticModel& model, std::string_view path,
                                                const SourceSpan& span = {});

// Path text that parse_model reads back to the same node; labels that are not
// plain identifiers are quoted.
std::string format_path(const StaticModel& model, ActionId id);

}  // namespace tmkit

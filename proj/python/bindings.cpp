#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tmkit/behavior.hpp"
#include "tmkit/dsl.hpp"
#include "tmkit/dynamics.hpp"
#include "tmkit/io.hpp"
#include "tmkit/validator.hpp"

namespace py = pybind11;
using namespace tmkit;

namespace {

std::string joined(const std::vector<Diagnostic>& ds) {
    std::string out;
    for (const Diagnostic& d : ds) out += (out.empty() ? "" : "\n") + format_diagnostic(d);
    return out;
}

std::string event_name(const Trace& t, EventId e) { return t.events.at(e.index()).name; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Thinging-machine models: parsing, validation, simulation and export";

    static py::exception<std::runtime_error> parse_error(m, "ParseError", PyExc_ValueError);
    py::register_exception<TraceFormatError>(m, "TraceFormatError", PyExc_ValueError);
    py::register_exception<DynamicsError>(m, "DynamicsError", PyExc_RuntimeError);
    py::register_exception<RegionBudgetExceeded>(m, "RegionBudgetExceeded", PyExc_RuntimeError);

    py::class_<Diagnostic>(m, "Diagnostic")
        .def_property_readonly("severity",
                               [](const Diagnostic& d) { return d.severity == Severity::Error ? "error" : "warning"; })
        .def_readonly("code", &Diagnostic::code)
        .def_readonly("message", &Diagnostic::message)
        .def_property_readonly("file", [](const Diagnostic& d) { return d.span.file; })
        .def_property_readonly("line", [](const Diagnostic& d) { return d.span.line; })
        .def_property_readonly("column", [](const Diagnostic& d) { return d.span.column; })
        .def("__str__", [](const Diagnostic& d) { return format_diagnostic(d); })
        .def("__repr__", [](const Diagnostic& d) { return "<Diagnostic " + format_diagnostic(d) + ">"; });

    py::class_<StaticModel>(m, "Model")
        .def_property_readonly("name", &StaticModel::name)
        .def_property_readonly("thimacs",
                               [](const StaticModel& s) {
                                   std::vector<std::string> out;
                                   for (const Thimac& t : s.thimacs()) out.push_back(s.path_of(t.id));
                                   return out;
                               })
        .def_property_readonly("actions",
                               [](const StaticModel& s) {
                                   std::vector<std::string> out;
                                   for (const ActionNode& a : s.actions()) out.push_back(format_path(s, a.id));
                                   return out;
                               })
        .def_property_readonly("events",
                               [](const StaticModel& s) {
                                   std::vector<std::string> out;
                                   for (const EventDef& e : s.events()) out.push_back(e.name);
                                   return out;
                               })
        .def_property_readonly("arc_count", [](const StaticModel& s) { return s.arcs().size(); })
        .def("__eq__", [](const StaticModel& a, const StaticModel& b) { return a == b; })
        .def("__repr__", [](const StaticModel& s) {
            return "<Model " + s.name() + ": " + std::to_string(s.thimacs().size()) + " thimacs, " +
                   std::to_string(s.actions().size()) + " actions, " + std::to_string(s.events().size()) +
                   " events>";
        });

    py::class_<Firing>(m, "Firing")
        .def_readonly("slot", &Firing::slot)
        .def_property_readonly("arc", [](const Firing& f) { return f.arc.value; })
        .def_property_readonly("negative", [](const Firing& f) { return f.polarity == Polarity::Negative; })
        .def_readonly("alias", &Firing::alias);

    py::class_<Trace>(m, "Trace")
        .def_readonly("model_name", &Trace::model_name)
        .def_readonly("scenario_name", &Trace::scenario_name)
        .def_property_readonly("horizon", &Trace::horizon)
        .def_property_readonly("events",
                               [](const Trace& t) {
                                   std::vector<std::string> out;
                                   for (const TraceEvent& e : t.events) out.push_back(e.name);
                                   return out;
                               })
        .def_property_readonly("firings",
                               [](const Trace& t) {
                                   // (slot, src, dst, negative, alias)
                                   std::vector<py::tuple> out;
                                   for (const Firing& f : t.firings) {
                                       out.push_back(py::make_tuple(f.slot, event_name(t, f.src_event),
                                                                    event_name(t, f.dst_event),
                                                                    f.polarity == Polarity::Negative, f.alias));
                                   }
                                   return out;
                               })
        .def("actual", [](const Trace& t, int slot) {
            if (slot < 1 || slot > t.horizon()) throw py::index_error("slot out of range");
            std::vector<std::string> out;
            const SlotState& s = t.slots[static_cast<std::size_t>(slot - 1)];
            for (std::size_t i = 0; i < s.assignment.size(); ++i) {
                if (s.assignment[i] == PAState::Actual) out.push_back(t.events[i].name);
            }
            return out;
        }, py::arg("slot"))
        .def("is_full_potentiality", [](const Trace& t, int slot) { return is_full_potentiality(t, slot); },
             py::arg("slot"))
        .def("__eq__", [](const Trace& a, const Trace& b) { return a == b; });

    m.def(
        "parse_model",
        [](std::string_view text, std::string_view origin) {
            ModelParse p = parse_model(text, origin);
            if (!p.ok()) {
                PyErr_SetString(parse_error.ptr(), joined(p.diagnostics).c_str());
                throw py::error_already_set();
            }
            return *p.model;
        },
        py::arg("text"), py::arg("origin") = "<model>", "Parse model text; raises ParseError on errors.");

    m.def(
        "validate",
        [](const StaticModel& model, bool strict) {
            ValidationReport r = validate(model, ValidateOptions{strict});
            std::vector<Diagnostic> all = r.diagnostics;
            auto lift = lift_diagnostics(model);
            all.insert(all.end(), lift.begin(), lift.end());
            return all;
        },
        py::arg("model"), py::arg("strict") = false);

    m.def(
        "simulate",
        [](const StaticModel& model, std::string_view scenario, std::string_view origin, std::optional<int> slots) {
            ScenarioParse p = parse_scenario(scenario, model, origin, slots);
            if (!p.ok()) {
                PyErr_SetString(parse_error.ptr(), joined(p.diagnostics).c_str());
                throw py::error_already_set();
            }
            py::gil_scoped_release release;
            return run_scenario(model, *p.script);
        },
        py::arg("model"), py::arg("scenario"), py::arg("origin") = "<scenario>", py::arg("slots") = py::none());

    m.def(
        "pa_table",
        [](const Trace& t) {
            PATable table = emit_pa_table(t);
            std::vector<std::pair<std::string, std::string>> rows;
            for (std::size_t r = 0; r < table.events.size(); ++r) rows.emplace_back(table.events[r], table.row_glyphs(r));
            return rows;
        },
        "Rows of (event, glyphs) with '+' for Actual and '-' for Potential.");

    m.def(
        "occurrences",
        [](const Trace& t) {
            std::vector<py::tuple> out;
            for (const Occurrence& o : derive_occurrences(t)) out.push_back(py::make_tuple(event_name(t, o.event), o.start, o.end));
            return out;
        });

    m.def(
        "behavior_edges",
        [](const Trace& t) {
            BehaviorGraph g = derive_behavior(t);
            std::vector<py::tuple> out;
            for (const BehaviorEdge& e : g.edges) {
                const Occurrence& s = g.nodes[e.src];
                const Occurrence& d = g.nodes[e.dst];
                std::string kind = e.kind == EdgeKind::Chronological ? "then"
                                   : e.firing->polarity == Polarity::Negative ? "stops"
                                                                              : "triggers";
                out.push_back(py::make_tuple(event_name(t, s.event), s.start, event_name(t, d.event), d.start, kind));
            }
            return out;
        });

    m.def("serialize_model", &serialize_model);
    m.def("export_static", &export_static);
    m.def(
        "export_dynamic",
        [](const StaticModel& model, const Trace& t, int slot) {
            if (slot < 1 || slot > t.horizon()) throw py::index_error("slot out of range");
            return export_dynamic(model, t.slots[static_cast<std::size_t>(slot - 1)]);
        },
        py::arg("model"), py::arg("trace"), py::arg("slot"));
    m.def("export_behavior", [](const Trace& t) { return export_behavior(derive_behavior(t), t); });
    m.def("export_table_csv", [](const Trace& t) { return export_table_csv(emit_pa_table(t)); });
    m.def("save_trace", &save_trace);
    m.def("load_trace", [](std::string_view text) { return load_trace(text); });
    m.def(
        "enumerate_regions",
        [](const StaticModel& model, int max_nodes, std::size_t cap) {
            std::vector<std::vector<std::string>> out;
            for (const Region& r : enumerate_regions(model, max_nodes, cap)) {
                std::vector<std::string> nodes;
                for (ActionId a : r.nodes) nodes.push_back(format_path(model, a));
                out.push_back(nodes);
            }
            return out;
        },
        py::arg("model"), py::arg("max_nodes"), py::arg("cap") = kDefaultRegionCap);
}

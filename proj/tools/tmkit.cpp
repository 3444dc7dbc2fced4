#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tmkit/behavior.hpp"
#include "tmkit/dsl.hpp"
#include "tmkit/dynamics.hpp"
#include "tmkit/io.hpp"
#include "tmkit/validator.hpp"

namespace fs = std::filesystem;
using namespace tmkit;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Failure {
    int code;
};

bool color_enabled() {
    const char* v = std::getenv("TM_COLOR");
    return v && std::string(v) == "1";
}

void report(const std::vector<Diagnostic>& diags) {
    const bool color = color_enabled();
    for (const Diagnostic& d : diags) std::cerr << format_diagnostic(d, color) << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read " << path << "\n";
        throw Failure{kUsage};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        std::cerr << "error: cannot write " << path << "\n";
        throw Failure{kFailed};
    }
}

void emit(const std::optional<std::string>& path, const std::string& text) {
    if (path) {
        write_file(*path, text);
    } else {
        std::cout << text;
    }
}

struct LoadedModel {
    StaticModel model;
    SourceMap spans;
};

LoadedModel load_model(const std::string& path) {
    ModelParse p = parse_model(read_file(path), path);
    report(p.diagnostics);
    if (!p.ok()) throw Failure{kFailed};
    return {std::move(*p.model), std::move(p.spans)};
}

Trace load_trace_file(const std::string& path) {
    try {
        return load_trace(read_file(path));
    } catch (const TraceFormatError& e) {
        std::cerr << path << ": " << e.what() << "\n";
        throw Failure{kFailed};
    }
}

struct SimOutcome {
    std::vector<Diagnostic> diagnostics;
    std::optional<Trace> trace;
};

SimOutcome simulate_one(const LoadedModel& m, const std::string& scenario_path, std::optional<int> slots) {
    SimOutcome out;
    std::string text;
    {
        std::ifstream in(scenario_path, std::ios::binary);
        if (!in) {
            out.diagnostics.push_back(Diagnostic{Severity::Error, std::string(codes::kScenarioSyntax),
                                                 "cannot read scenario file", SourceSpan{scenario_path, 1, 1}});
            return out;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    ScenarioParse sp = parse_scenario(text, m.model, scenario_path, slots);
    out.diagnostics = sp.diagnostics;
    if (!sp.ok()) return out;
    try {
        out.trace = run_scenario(m.model, *sp.script);
    } catch (const DynamicsError& e) {
        auto lift = lift_diagnostics(m.model, &m.spans);
        out.diagnostics.insert(out.diagnostics.end(), lift.begin(), lift.end());
    }
    return out;
}

int cmd_validate(const std::string& file, bool strict) {
    LoadedModel m = load_model(file);
    ValidationReport r = validate(m.model, ValidateOptions{strict}, &m.spans);
    std::vector<Diagnostic> diags = r.diagnostics;
    auto lift = lift_diagnostics(m.model, &m.spans);
    diags.insert(diags.end(), lift.begin(), lift.end());
    report(diags);
    return has_errors(diags) ? kFailed : kOk;
}

int cmd_simulate(const std::string& model_path, const std::optional<std::string>& scenario,
                 const std::optional<std::string>& batch, std::optional<int> slots,
                 const std::optional<std::string>& out) {
    if (scenario.has_value() == batch.has_value()) {
        std::cerr << "error: simulate needs exactly one of --scenario or --batch\n";
        return kUsage;
    }
    LoadedModel m = load_model(model_path);

    if (scenario) {
        SimOutcome r = simulate_one(m, *scenario, slots);
        report(r.diagnostics);
        if (!r.trace) return kFailed;
        emit(out, save_trace(*r.trace));
        return kOk;
    }

    if (!fs::is_directory(*batch)) {
        std::cerr << "error: " << *batch << " is not a directory\n";
        return kUsage;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(*batch)) {
        if (entry.is_regular_file() && entry.path().extension() == ".tms") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    std::vector<std::future<SimOutcome>> jobs;
    for (const fs::path& f : files) {
        jobs.push_back(std::async(std::launch::async, simulate_one, std::cref(m), f.string(), slots));
    }
    if (out) fs::create_directories(*out);
    bool failed = false;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        SimOutcome r = jobs[i].get();
        report(r.diagnostics);
        if (!r.trace) {
            failed = true;
            continue;
        }
        std::string text = save_trace(*r.trace);
        if (out) {
            write_file((fs::path(*out) / files[i].stem()).string() + ".json", text);
        } else {
            std::cout << text;
        }
    }
    return failed ? kFailed : kOk;
}

int cmd_table(const std::string& trace_path, const std::optional<std::string>& csv) {
    PATable table = emit_pa_table(load_trace_file(trace_path));
    if (csv) {
        if (*csv == "-") {
            std::cout << export_table_csv(table);
        } else {
            write_file(*csv, export_table_csv(table));
        }
    } else {
        std::cout << format_table(table);
    }
    return kOk;
}

int cmd_behavior(const std::string& trace_path, const std::optional<std::string>& dot) {
    Trace trace = load_trace_file(trace_path);
    BehaviorGraph g = derive_behavior(trace);
    if (dot) {
        emit(*dot == "-" ? std::nullopt : dot, export_behavior(g, trace));
        return kOk;
    }
    for (const Occurrence& o : g.nodes) {
        std::cout << trace.events[o.event.index()].name << " [" << o.start << "," << o.end << "]\n";
    }
    for (const BehaviorEdge& e : g.edges) {
        const Occurrence& s = g.nodes[e.src];
        const Occurrence& d = g.nodes[e.dst];
        std::cout << trace.events[s.event.index()].name << "@" << s.start << " -> "
                  << trace.events[d.event.index()].name << "@" << d.start;
        if (e.kind == EdgeKind::Chronological) {
            std::cout << " (then)";
        } else if (e.firing->polarity == Polarity::Negative) {
            std::string ne = negative_event_name(trace.events[e.firing->dst_event.index()].name);
            std::cout << " (stops, " << (e.firing->alias.empty() ? ne : e.firing->alias + " = " + ne) << ")";
        } else {
            std::cout << " (triggers)";
        }
        std::cout << "\n";
    }
    return kOk;
}

int cmd_render(const std::string& model_path, const std::string& level, std::optional<int> slot,
               const std::optional<std::string>& scenario, const std::optional<std::string>& dot) {
    LoadedModel m = load_model(model_path);
    if (level == "static") {
        emit(dot, export_static(m.model));
        return kOk;
    }
    if (!slot || !scenario) {
        std::cerr << "error: --level dynamic needs --slot and --scenario\n";
        return kUsage;
    }
    SimOutcome r = simulate_one(m, *scenario, std::nullopt);
    report(r.diagnostics);
    if (!r.trace) return kFailed;
    if (*slot < 1 || *slot > r.trace->horizon()) {
        std::cerr << "error: slot " << *slot << " outside 1.." << r.trace->horizon() << "\n";
        return kUsage;
    }
    emit(dot, export_dynamic(m.model, r.trace->slots[static_cast<std::size_t>(*slot - 1)]));
    return kOk;
}

int cmd_regions(const std::string& model_path, int max_nodes, std::size_t cap) {
    LoadedModel m = load_model(model_path);
    std::vector<Region> regions;
    try {
        regions = enumerate_regions(m.model, max_nodes, cap);
    } catch (const RegionBudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
    for (const Region& r : regions) {
        std::string line;
        for (ActionId n : r.nodes) line += (line.empty() ? "" : " ") + format_path(m.model, n);
        std::cout << line << "\n";
    }
    std::cerr << regions.size() << " regions\n";
    return kOk;
}

int cmd_format(const std::string& model_path) {
    LoadedModel m = load_model(model_path);
    std::cout << serialize_model(m.model);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thinging-machine model toolkit"};
    app.require_subcommand(1);

    std::string file;
    bool strict = false;
    auto* validate_cmd = app.add_subcommand("validate", "Check a model for well-formedness");
    validate_cmd->add_option("FILE", file, "Model file (.tm)")->required();
    validate_cmd->add_flag("--strict", strict, "Treat V1 and V3 warnings as errors");

    std::optional<std::string> scenario, batch, out;
    std::optional<int> slots;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run scenarios and write traces");
    simulate_cmd->add_option("MODEL", file, "Model file (.tm)")->required();
    simulate_cmd->add_option("--scenario", scenario, "Scenario file (.tms)");
    simulate_cmd->add_option("--batch", batch, "Directory of scenario files");
    simulate_cmd->add_option("--slots", slots, "Override the scenario horizon")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--out", out, "Trace file, or output directory with --batch");

    std::string trace_path;
    std::optional<std::string> csv;
    auto* table_cmd = app.add_subcommand("table", "Print the P/A table of a trace");
    table_cmd->add_option("TRACE", trace_path, "Trace file")->required();
    table_cmd->add_option("--csv", csv, "Write CSV to PATH ('-' for stdout)");

    std::optional<std::string> dot;
    auto* behavior_cmd = app.add_subcommand("behavior", "Derive the behavior graph of a trace");
    behavior_cmd->add_option("TRACE", trace_path, "Trace file")->required();
    behavior_cmd->add_option("--dot", dot, "Write graph text to PATH ('-' for stdout)");

    std::string level = "static";
    std::optional<int> slot;
    auto* render_cmd = app.add_subcommand("render", "Export the model as graph text");
    render_cmd->add_option("MODEL", file, "Model file (.tm)")->required();
    render_cmd->add_option("--level", level, "static or dynamic")
        ->check(CLI::IsMember({"static", "dynamic"}));
    render_cmd->add_option("--slot", slot, "Slot to show with --level dynamic");
    render_cmd->add_option("--scenario", scenario, "Scenario for --level dynamic");
    render_cmd->add_option("--dot", dot, "Output path");

    int max_nodes = 0;
    std::size_t cap = kDefaultRegionCap;
    auto* regions_cmd = app.add_subcommand("regions", "List connected induced subdiagrams");
    regions_cmd->add_option("MODEL", file, "Model file (.tm)")->required();
    regions_cmd->add_option("--max-nodes", max_nodes, "Largest region size")->required()->check(
        CLI::PositiveNumber);
    regions_cmd->add_option("--cap", cap, "Abort when more regions exist");

    auto* format_cmd = app.add_subcommand("format", "Print the model in canonical form");
    format_cmd->add_option("MODEL", file, "Model file (.tm)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*validate_cmd) return cmd_validate(file, strict);
        if (*simulate_cmd) return cmd_simulate(file, scenario, batch, slots, out);
        if (*table_cmd) return cmd_table(trace_path, csv);
        if (*behavior_cmd) return cmd_behavior(trace_path, dot);
        if (*render_cmd) return cmd_render(file, level, slot, scenario, dot);
        if (*regions_cmd) return cmd_regions(file, max_nodes, cap);
        if (*format_cmd) return cmd_format(file);
    } catch (const Failure& f) {
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
    return kUsage;
}

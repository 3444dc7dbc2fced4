#include <doctest.h>

#include "support.hpp"
#include "tmkit/dsl.hpp"

using namespace tmkit;
using tmtest::load_model;

namespace {

ModelParse parse(std::string_view text) { return parse_model(text, "dir/sample.tm"); }

std::vector<std::string> codes_of(const std::vector<Diagnostic>& ds) {
    std::vector<std::string> out;
    for (const auto& d : ds) out.push_back(d.code);
    return out;
}

const char* kOven = R"(
thimac Oven {
  action process:cook
  action process:"warm up"
  thimac Heat { action create; action process }
}
)";

}  // namespace

TEST_CASE("bulb fixture structure") {
    StaticModel m = load_model("bulb.tm");
    CHECK(m.name() == "bulb");
    CHECK(m.frozen());
    REQUIRE(m.roots().size() == 3);
    CHECK(m.thimac(m.roots()[0]).name == "Current");
    CHECK(m.thimac(m.roots()[1]).name == "Bulb");
    CHECK(m.thimac(m.roots()[2]).name == "Light");

    auto current_transfer = std::get<ActionId>(resolve_path(m, "Current.transfer"));
    auto bulb_transfer = std::get<ActionId>(resolve_path(m, "Bulb.transfer"));
    auto light_create = std::get<ActionId>(resolve_path(m, "Light.create"));
    int cross_flows = 0, triggers_to_light = 0;
    for (const Arc& a : m.arcs()) {
        if (a.arc_class == ArcClass::Flow && a.src == current_transfer && a.dst == bulb_transfer) ++cross_flows;
        if (a.is_trigger() && a.dst == light_create) ++triggers_to_light;
    }
    CHECK(cross_flows == 1);
    CHECK(triggers_to_light == 1);
    CHECK(m.events().size() == 3);
    CHECK(m.event(EventId{0}).kind == EventKind::Instance);
}

TEST_CASE("empty file gives an empty model named after the stem") {
    ModelParse p = parse("");
    REQUIRE(p.ok());
    CHECK(p.diagnostics.empty());
    CHECK(p.model->name() == "sample");
    CHECK(p.model->thimacs().empty());

    ModelParse comments = parse("# nothing here\n\n");
    REQUIRE(comments.ok());
    CHECK(comments.model->name() == "sample");
}

TEST_CASE("model declaration overrides the stem") {
    ModelParse p = parse("model \"My Oven\"\n");
    REQUIRE(p.ok());
    CHECK(p.model->name() == "My Oven");
}

TEST_CASE("unknown reference is reported at the arc") {
    ModelParse p = parse("thimac A { action create }\n\nflow A.create -> B.receive\n");
    CHECK_FALSE(p.ok());
    REQUIRE(p.diagnostics.size() == 1);
    CHECK(p.diagnostics[0].code == "TM0002");
    CHECK(p.diagnostics[0].span.file == "dir/sample.tm");
    CHECK(p.diagnostics[0].span.line == 3);
    CHECK(p.diagnostics[0].span.column == 1);
}

TEST_CASE("syntax errors") {
    for (const char* text : {"thimac {", "thimac A { action jump }", "flow A.create B.process", "event E1 { A.create",
                             "bogus", "thimac A { action create } }", "\"unterminated", "ne E7 = neg(E1, E2)"}) {
        ModelParse p = parse(text);
        CAPTURE(text);
        CHECK_FALSE(p.ok());
        REQUIRE_FALSE(p.diagnostics.empty());
        CHECK(p.diagnostics[0].code == "TM0001");
    }
}

TEST_CASE("syntax error position") {
    ModelParse p = parse("thimac A {\n  action create\n  action ;\n}\n");
    REQUIRE(p.diagnostics.size() == 1);
    CHECK(p.diagnostics[0].code == "TM0001");
    CHECK(p.diagnostics[0].span.line == 3);
    CHECK(p.diagnostics[0].span.column == 10);
}

TEST_CASE("invalid utf-8 is a syntax error") {
    ModelParse p = parse("thimac A\xff\n");
    REQUIRE_FALSE(p.diagnostics.empty());
    CHECK(p.diagnostics[0].code == "TM0001");
}

TEST_CASE("illegal flow") {
    ModelParse p = parse("thimac A { action process; action receive }\nflow A.process -> A.receive\n");
    CHECK_FALSE(p.ok());
    REQUIRE(p.diagnostics.size() == 1);
    CHECK(p.diagnostics[0].code == "TM0003");
    CHECK(p.diagnostics[0].message.find("IllegalFlowAdjacency(process, receive)") != std::string::npos);
}

TEST_CASE("duplicates") {
    CHECK(codes_of(parse("thimac A\nthimac A\n").diagnostics) == std::vector<std::string>{"TM0004"});
    CHECK(codes_of(parse("thimac A { action create; action create }").diagnostics) ==
          std::vector<std::string>{"TM0004"});
    CHECK(codes_of(parse("thimac A { action create }\nevent E1 { A.create }\nevent E1 { A.create }\n")
                       .diagnostics) == std::vector<std::string>{"TM0004"});
}

TEST_CASE("self trigger and bad regions") {
    CHECK(codes_of(parse("thimac A { action create }\ntrigger A.create -> A.create\n").diagnostics) ==
          std::vector<std::string>{"TM0007"});
    CHECK(codes_of(parse("thimac A { action create }\nevent E1 { }\n").diagnostics) ==
          std::vector<std::string>{"TM0006"});
}

TEST_CASE("reports every reference error, not only the first") {
    ModelParse p = parse("thimac A { action create }\nflow A.create -> X.process\nflow Y.create -> A.create\n");
    CHECK(codes_of(p.diagnostics) == std::vector<std::string>{"TM0002", "TM0002"});
}

TEST_CASE("nested and dotted thimac declarations") {
    ModelParse p = parse("thimac Oven\nthimac Oven.Heat { action create }\nthimac Oven.Heat.Coil\n");
    REQUIRE(p.ok());
    const StaticModel& m = *p.model;
    CHECK(m.thimacs().size() == 3);
    CHECK(m.path_of(ThimacId{2}) == "Oven.Heat.Coil");
    CHECK(codes_of(parse("thimac Ghost.Heat\n").diagnostics) == std::vector<std::string>{"TM0002"});
}

TEST_CASE("resolve_path") {
    ModelParse p = parse(kOven);
    REQUIRE(p.ok());
    const StaticModel& m = *p.model;

    auto heat_process = resolve_path(m, "Oven.Heat.process");
    REQUIRE(std::holds_alternative<ActionId>(heat_process));
    const ActionNode& n = m.action(std::get<ActionId>(heat_process));
    CHECK(n.kind == ActionKind::Process);
    CHECK(m.thimac(n.owner).name == "Heat");

    auto ambiguous = resolve_path(m, "Oven.process");
    REQUIRE(std::holds_alternative<Diagnostic>(ambiguous));
    CHECK(std::get<Diagnostic>(ambiguous).code == "TM0005");

    auto cook = resolve_path(m, "Oven.process:cook");
    REQUIRE(std::holds_alternative<ActionId>(cook));
    CHECK(m.action(std::get<ActionId>(cook)).label == "cook");

    auto warm = resolve_path(m, "Oven.process:\"warm up\"");
    REQUIRE(std::holds_alternative<ActionId>(warm));
    CHECK(format_path(m, std::get<ActionId>(warm)) == "Oven.process:\"warm up\"");

    for (const char* bad : {"Oven.Heat.release", "Nope.create", "Oven.process:bake", "Oven.Heat.Coil.create"}) {
        auto r = resolve_path(m, bad);
        CAPTURE(bad);
        REQUIRE(std::holds_alternative<Diagnostic>(r));
        CHECK(std::get<Diagnostic>(r).code == "TM0002");
    }
}

TEST_CASE("single labeled node resolves without its label") {
    ModelParse p = parse("thimac T { action process:tick }");
    REQUIRE(p.ok());
    auto r = resolve_path(*p.model, "T.process");
    REQUIRE(std::holds_alternative<ActionId>(r));
}

TEST_CASE("events with exclusions and lift overrides") {
    ModelParse p = parse(R"(
thimac A { action create; action process }
thimac B { action create }
flow A.create -> A.process
trigger A.process -> B.create
trigger A.create -> B.create
event E1 { A.create, A.process without flow A.create -> A.process }
event E2 { A.process }
event E3 { B.create }
trigger A.process -> A.create lifts to E2 -> E1
ne N1 "stops" = neg(E1 -> E3)
)");
    REQUIRE(p.ok());
    const StaticModel& m = *p.model;
    for (ArcId a : m.event(EventId{0}).region.arcs) CHECK(m.arc(a).is_trigger());
    REQUIRE(m.lift_overrides().size() == 1);
    CHECK(m.lift_overrides()[0].src == EventId{1});
    REQUIRE(m.negative_aliases().size() == 1);
    CHECK(m.negative_aliases()[0].label == "stops");

    CHECK(codes_of(parse("thimac A { action create; action process }\nflow A.create -> A.process\n"
                         "event E1 { A.create, A.process }\nevent E2 { A.process }\n"
                         "trigger A.process -> A.create lifts to E2 -> E1\n")
                       .diagnostics)
              .empty());
    CHECK(codes_of(parse("thimac A { action create; action process }\nevent E1 { A.create }\n"
                         "event E2 { A.process }\ntrigger A.process -> A.create lifts to E1 -> E2\n")
                       .diagnostics) == std::vector<std::string>{"TM0008"});
}

TEST_CASE("parse is deterministic") {
    std::string text = tmtest::read_fixture("microwave.tm");
    ModelParse a = parse_model(text, "m.tm");
    ModelParse b = parse_model(text, "m.tm");
    REQUIRE(a.ok());
    CHECK(*a.model == *b.model);
    CHECK(a.diagnostics == b.diagnostics);
    ModelParse bad1 = parse_model("thimac A\nflow A.x -> B.y\n", "x.tm");
    ModelParse bad2 = parse_model("thimac A\nflow A.x -> B.y\n", "x.tm");
    CHECK(bad1.diagnostics == bad2.diagnostics);
}

TEST_CASE("scenario parsing") {
    StaticModel m = load_model("bulb.tm");

    ScenarioParse p = parse_scenario("slots 7; at 1 actualize E1 persist; at 2 actualize E2; at 5 potentialize E2", m,
                                     "bulb_on_off.tms");
    REQUIRE(p.ok());
    CHECK(p.script->slots == 7);
    CHECK(p.script->name == "bulb_on_off");
    REQUIRE(p.script->directives.size() == 3);
    CHECK(p.script->directives[0].persist);
    CHECK(p.script->directives[2].verb == Verb::Potentialize);
    CHECK(p.script->directives[2].slot == 5);

    auto code = [&](std::string_view text) {
        ScenarioParse r = parse_scenario(text, m);
        CHECK_FALSE(r.ok());
        return r.diagnostics.empty() ? std::string() : r.diagnostics.front().code;
    };
    CHECK(code("slots 7\nat 9 actualize E2\n") == "TM0103");
    CHECK(code("slots 7\nat 0 actualize E2\n") == "TM0103");
    CHECK(code("slots 7\nat 2 potentialize E2 persist\n") == "TM0104");
    CHECK(code("slots 7\nat 2 actualize E9\n") == "TM0102");
    CHECK(code("at 2 actualize E2\n") == "TM0101");
    CHECK(code("slots 7\nat two actualize E2\n") == "TM0101");
    CHECK(code("slots 0\n") == "TM0101");
}

TEST_CASE("scenario directives are ordered by slot, file order within a slot") {
    StaticModel m = load_model("bulb.tm");
    ScenarioParse p = parse_scenario("slots 5\nat 3 actualize E3\nat 1 actualize E1\nat 3 potentialize E2\n", m);
    REQUIRE(p.ok());
    const auto& d = p.script->directives;
    REQUIRE(d.size() == 3);
    CHECK(d[0].slot == 1);
    CHECK(d[1].event == EventId{2});
    CHECK(d[2].verb == Verb::Potentialize);
}

TEST_CASE("slots override") {
    StaticModel m = load_model("bulb.tm");
    std::string text = "slots 7\nat 6 actualize E2\n";
    CHECK(parse_scenario(text, m, "s", 10).script->slots == 10);
    ScenarioParse shorter = parse_scenario(text, m, "s", 5);
    REQUIRE_FALSE(shorter.ok());
    CHECK(shorter.diagnostics[0].code == "TM0103");
}

#include "tmkit/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>

#include "lexer.hpp"

namespace tmkit {

using detail::Token;
using detail::TokenKind;

namespace {

struct SyntaxError {
    Diagnostic diagnostic;
};

struct PathRef {
    std::vector<std::string> segments;
    std::optional<std::string> label;
    SourceSpan span;
};

Diagnostic error(std::string_view code, std::string message, SourceSpan span) {
    return Diagnostic{Severity::Error, std::string(code), std::move(message), std::move(span)};
}

// Cursor over a token stream with the helpers both grammars need.
class TokenCursor {
public:
    TokenCursor(std::vector<Token> tokens, std::string file, std::string_view syntax_code)
        : tokens_(std::move(tokens)), file_(std::move(file)), syntax_code_(syntax_code) {}

    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    const Token& next() {
        const Token& t = peek();
        if (pos_ < tokens_.size() - 1) ++pos_;
        return t;
    }
    bool at_end() const { return peek().kind == TokenKind::End; }

    bool is_punct(std::string_view p, std::size_t ahead = 0) const {
        return peek(ahead).kind == TokenKind::Punct && peek(ahead).text == p;
    }
    bool is_keyword(std::string_view k) const {
        return peek().kind == TokenKind::Ident && peek().text == k;
    }
    bool accept_punct(std::string_view p) {
        if (!is_punct(p)) return false;
        next();
        return true;
    }
    bool accept_keyword(std::string_view k) {
        if (!is_keyword(k)) return false;
        next();
        return true;
    }

    SourceSpan span(const Token& t) const { return SourceSpan{file_, t.line, t.column}; }
    SourceSpan here() const { return span(peek()); }

    [[noreturn]] void fail(std::string message) const { fail_at(peek(), std::move(message)); }
    [[noreturn]] void fail_at(const Token& t, std::string message) const {
        throw SyntaxError{error(syntax_code_, std::move(message), span(t))};
    }

    static std::string describe(const Token& t) {
        switch (t.kind) {
            case TokenKind::End: return "end of input";
            case TokenKind::String: return "string \"" + t.text + "\"";
            default: return "'" + t.text + "'";
        }
    }

    void expect_punct(std::string_view p) {
        if (!accept_punct(p)) fail("expected '" + std::string(p) + "', found " + describe(peek()));
    }
    void expect_keyword(std::string_view k) {
        if (!accept_keyword(k)) fail("expected '" + std::string(k) + "', found " + describe(peek()));
    }
    const Token& expect_ident(std::string_view what) {
        if (peek().kind != TokenKind::Ident) {
            fail("expected " + std::string(what) + ", found " + describe(peek()));
        }
        return next();
    }
    int expect_int(std::string_view what) {
        const Token& t = peek();
        if (t.kind != TokenKind::Number) fail("expected " + std::string(what) + ", found " + describe(t));
        int value = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) fail_at(t, "integer out of range");
        next();
        return value;
    }
    std::string expect_label() {
        const Token& t = peek();
        if (t.kind != TokenKind::Ident && t.kind != TokenKind::String) {
            fail("expected a label, found " + describe(t));
        }
        if (t.kind == TokenKind::String && t.text.empty()) fail_at(t, "empty label");
        return next().text;
    }

    PathRef parse_path() {
        PathRef ref;
        ref.span = here();
        ref.segments.push_back(expect_ident("a path").text);
        while (accept_punct(".")) ref.segments.push_back(expect_ident("a path segment").text);
        if (accept_punct(":")) ref.label = expect_label();
        return ref;
    }

    const std::string& file() const { return file_; }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::string file_;
    std::string_view syntax_code_;
};

std::variant<ActionId, Diagnostic> resolve_ref(const StaticModel& model, const PathRef& ref) {
    auto joined = [&] {
        std::string s;
        for (const auto& seg : ref.segments) s += (s.empty() ? "" : ".") + seg;
        if (ref.label) s += ":" + *ref.label;
        return s;
    };
    if (ref.segments.size() < 2) {
        return error(codes::kUnknownReference,
                     "path '" + joined() + "' must name a thimac and an action kind", ref.span);
    }
    std::optional<ThimacId> scope;
    for (std::size_t i = 0; i + 1 < ref.segments.size(); ++i) {
        scope = model.find_child(scope, ref.segments[i]);
        if (!scope) {
            return error(codes::kUnknownReference,
                         "unknown thimac '" + ref.segments[i] + "' in path '" + joined() + "'",
                         ref.span);
        }
    }
    auto kind = parse_action_kind(ref.segments.back());
    if (!kind) {
        return error(codes::kUnknownReference,
                     "unknown action kind '" + ref.segments.back() + "' in path '" + joined() + "'",
                     ref.span);
    }
    if (ref.label) {
        if (auto a = model.find_action(*scope, *kind, *ref.label)) return *a;
        return error(codes::kUnknownReference, "unknown action '" + joined() + "'", ref.span);
    }
    if (auto a = model.find_action(*scope, *kind, "")) return *a;
    std::vector<ActionId> candidates;
    for (ActionId a : model.thimac(*scope).actions) {
        if (model.action(a).kind == *kind) candidates.push_back(a);
    }
    if (candidates.size() == 1) return candidates.front();
    if (candidates.empty()) {
        return error(codes::kUnknownReference, "unknown action '" + joined() + "'", ref.span);
    }
    std::string options;
    for (ActionId a : candidates) options += (options.empty() ? "" : ", ") + model.action(a).label;
    return error(codes::kAmbiguousPath,
                 "ambiguous path '" + joined() + "'; qualify with a label (" + options + ")",
                 ref.span);
}

std::string file_stem(std::string_view origin) {
    return std::filesystem::path(std::string(origin)).stem().string();
}

// ---------------------------------------------------------------------------
// Model grammar

struct PendingArc {
    ArcClass arc_class;
    Polarity polarity;
    PathRef src, dst;
    SourceSpan span;
    std::optional<std::pair<Token, Token>> lift;
    std::optional<ArcId> created;
};

struct PendingExclusion {
    std::optional<ArcClass> arc_class;
    std::optional<Polarity> polarity;
    PathRef src, dst;
    SourceSpan span;
};

struct PendingEvent {
    Token id;
    std::string label;
    EventKind kind;
    std::vector<PathRef> nodes;
    std::vector<PendingExclusion> exclusions;
    SourceSpan span;
};

struct PendingAlias {
    Token id;
    std::string label;
    Token src, dst;
};

class ModelParser {
public:
    ModelParser(std::vector<Token> tokens, std::string_view origin)
        : cur_(std::move(tokens), std::string(origin), codes::kSyntax),
          model_(file_stem(origin)) {}

    ModelParse run() {
        try {
            while (!cur_.at_end()) statement();
        } catch (const SyntaxError& e) {
            diags_.push_back(e.diagnostic);
        }
        if (!has_errors(diags_)) resolve_deferred();

        ModelParse out;
        out.diagnostics = std::move(diags_);
        out.spans = std::move(spans_);
        if (!has_errors(out.diagnostics)) {
            model_.freeze();
            out.model = std::move(model_);
        }
        return out;
    }

private:
    void statement() {
        if (cur_.accept_punct(";")) return;
        const Token& kw = cur_.peek();
        if (kw.kind != TokenKind::Ident) cur_.fail("expected a declaration, found " + TokenCursor::describe(kw));
        if (kw.text == "model") {
            cur_.next();
            if (saw_model_) cur_.fail_at(kw, "duplicate model declaration");
            saw_model_ = true;
            const Token& name = cur_.peek();
            if (name.kind != TokenKind::Ident && name.kind != TokenKind::String) {
                cur_.fail("expected a model name, found " + TokenCursor::describe(name));
            }
            model_.set_name(cur_.next().text);
        } else if (kw.text == "thimac") {
            thimac_decl(std::nullopt, true);
        } else if (kw.text == "flow" || kw.text == "trigger" || kw.text == "negtrigger") {
            arc_decl();
        } else if (kw.text == "event" || kw.text == "instance") {
            event_decl();
        } else if (kw.text == "ne") {
            alias_decl();
        } else {
            cur_.fail("unknown declaration '" + kw.text + "'");
        }
    }

    // `scope_valid` is false inside the body of a thimac that failed to register;
    // its members are parsed but not added.
    void thimac_decl(std::optional<ThimacId> scope, bool scope_valid) {
        const Token& kw = cur_.next();
        PathRef path = cur_.parse_path();
        if (path.label) cur_.fail_at(kw, "thimac paths take no label");

        std::optional<ThimacId> created;
        bool valid = scope_valid;
        if (valid) {
            std::optional<ThimacId> parent = scope;
            for (std::size_t i = 0; i + 1 < path.segments.size() && valid; ++i) {
                parent = model_.find_child(parent, path.segments[i]);
                if (!parent) {
                    diags_.push_back(error(codes::kUnknownReference,
                                           "unknown parent thimac '" + path.segments[i] + "'", path.span));
                    valid = false;
                }
            }
            if (valid) {
                const std::string& name = path.segments.back();
                if (model_.find_child(parent, name)) {
                    diags_.push_back(error(codes::kDuplicateName, "duplicate thimac '" + name + "'",
                                           path.span));
                    valid = false;
                } else {
                    created = model_.add_thimac(name, parent);
                    spans_.thimacs.push_back(cur_.span(kw));
                }
            }
        }

        if (!cur_.accept_punct("{")) return;
        while (!cur_.accept_punct("}")) {
            if (cur_.at_end()) cur_.fail("unterminated thimac block");
            if (cur_.accept_punct(";")) continue;
            if (cur_.is_keyword("action")) {
                action_decl(created, valid);
            } else if (cur_.is_keyword("thimac")) {
                thimac_decl(created, valid);
            } else {
                cur_.fail("expected 'action' or 'thimac', found " + TokenCursor::describe(cur_.peek()));
            }
        }
    }

    void action_decl(std::optional<ThimacId> owner, bool valid) {
        const Token& kw = cur_.next();
        const Token& kind_tok = cur_.expect_ident("an action kind");
        auto kind = parse_action_kind(kind_tok.text);
        if (!kind) cur_.fail_at(kind_tok, "unknown action kind '" + kind_tok.text + "'");
        std::string label;
        if (cur_.accept_punct(":")) label = cur_.expect_label();
        if (!valid || !owner) return;
        if (model_.find_action(*owner, *kind, label)) {
            diags_.push_back(error(codes::kDuplicateName,
                                   "duplicate action " + model_.path_of(*owner) + "." + kind_tok.text +
                                       (label.empty() ? "" : ":" + label),
                                   cur_.span(kw)));
            return;
        }
        model_.add_action(*owner, *kind, std::move(label));
        spans_.actions.push_back(cur_.span(kw));
    }

    void arc_decl() {
        const Token& kw = cur_.next();
        PendingArc arc;
        arc.span = cur_.span(kw);
        arc.arc_class = kw.text == "flow" ? ArcClass::Flow : ArcClass::Trigger;
        arc.polarity = kw.text == "negtrigger" ? Polarity::Negative : Polarity::Positive;
        arc.src = cur_.parse_path();
        cur_.expect_punct("->");
        arc.dst = cur_.parse_path();
        if (cur_.is_keyword("lifts")) {
            const Token& lifts = cur_.next();
            if (arc.arc_class == ArcClass::Flow) cur_.fail_at(lifts, "only triggers can carry a lift annotation");
            cur_.expect_keyword("to");
            Token from = cur_.expect_ident("an event id");
            cur_.expect_punct("->");
            Token to = cur_.expect_ident("an event id");
            arc.lift = std::make_pair(from, to);
        }
        arcs_.push_back(std::move(arc));
    }

    void event_decl() {
        const Token& kw = cur_.next();
        PendingEvent ev;
        ev.span = cur_.span(kw);
        ev.kind = kw.text == "instance" ? EventKind::Instance : EventKind::Event;
        ev.id = cur_.expect_ident("an event id");
        if (cur_.peek().kind == TokenKind::String) ev.label = cur_.next().text;
        cur_.expect_punct("{");
        while (!cur_.accept_punct("}")) {
            if (cur_.at_end()) cur_.fail("unterminated event block");
            if (cur_.accept_punct(",") || cur_.accept_punct(";")) continue;
            if (cur_.is_keyword("without")) {
                PendingExclusion ex;
                ex.span = cur_.here();
                cur_.next();
                const Token& cls = cur_.expect_ident("'arc', 'flow', 'trigger' or 'negtrigger'");
                if (cls.text == "flow") {
                    ex.arc_class = ArcClass::Flow;
                } else if (cls.text == "trigger") {
                    ex.arc_class = ArcClass::Trigger;
                    ex.polarity = Polarity::Positive;
                } else if (cls.text == "negtrigger") {
                    ex.arc_class = ArcClass::Trigger;
                    ex.polarity = Polarity::Negative;
                } else if (cls.text != "arc") {
                    cur_.fail_at(cls, "expected 'arc', 'flow', 'trigger' or 'negtrigger'");
                }
                ex.src = cur_.parse_path();
                cur_.expect_punct("->");
                ex.dst = cur_.parse_path();
                ev.exclusions.push_back(std::move(ex));
            } else {
                ev.nodes.push_back(cur_.parse_path());
            }
        }
        events_.push_back(std::move(ev));
    }

    void alias_decl() {
        cur_.next();
        PendingAlias alias;
        alias.id = cur_.expect_ident("an alias id");
        if (cur_.peek().kind == TokenKind::String) alias.label = cur_.next().text;
        cur_.expect_punct("=");
        cur_.expect_keyword("neg");
        cur_.expect_punct("(");
        alias.src = cur_.expect_ident("an event id");
        cur_.expect_punct("->");
        alias.dst = cur_.expect_ident("an event id");
        cur_.expect_punct(")");
        aliases_.push_back(std::move(alias));
    }

    // `at` replaces the path's own span, so arc errors point at the arc.
    std::optional<ActionId> resolve(const PathRef& ref, const SourceSpan* at = nullptr) {
        auto r = resolve_ref(model_, ref);
        if (auto* d = std::get_if<Diagnostic>(&r)) {
            if (at) d->span = *at;
            diags_.push_back(std::move(*d));
            return std::nullopt;
        }
        return std::get<ActionId>(r);
    }

    std::optional<EventId> resolve_event(const Token& t) {
        if (auto e = model_.find_event(t.text)) return e;
        diags_.push_back(error(codes::kUnknownReference, "unknown event '" + t.text + "'", cur_.span(t)));
        return std::nullopt;
    }

    void resolve_deferred() {
        for (PendingArc& arc : arcs_) {
            auto src = resolve(arc.src, &arc.span);
            auto dst = resolve(arc.dst, &arc.span);
            if (!src || !dst) continue;
            try {
                arc.created = model_.connect(*src, *dst, arc.arc_class, arc.polarity);
                spans_.arcs.push_back(arc.span);
            } catch (const ModelError& e) {
                auto code = e.code() == ModelErrc::SelfTrigger ? codes::kSelfTrigger : codes::kIllegalFlow;
                diags_.push_back(error(code, e.what(), arc.span));
            }
        }

        for (PendingEvent& ev : events_) {
            if (model_.find_event(ev.id.text)) {
                diags_.push_back(error(codes::kDuplicateName, "duplicate event id '" + ev.id.text + "'",
                                       cur_.span(ev.id)));
                continue;
            }
            if (ev.nodes.empty()) {
                diags_.push_back(error(codes::kBadRegion, "EmptyRegion: event '" + ev.id.text + "' has no nodes",
                                       ev.span));
                continue;
            }
            std::vector<ActionId> nodes;
            bool ok = true;
            for (const PathRef& p : ev.nodes) {
                if (auto a = resolve(p)) {
                    nodes.push_back(*a);
                } else {
                    ok = false;
                }
            }
            if (!ok) continue;
            std::vector<ArcId> arcs = model_.induced_arcs(nodes);
            for (const PendingExclusion& ex : ev.exclusions) {
                auto src = resolve(ex.src);
                auto dst = resolve(ex.dst);
                if (!src || !dst) {
                    ok = false;
                    continue;
                }
                auto matches = [&](ArcId id) {
                    const Arc& a = model_.arc(id);
                    return a.src == *src && a.dst == *dst &&
                           (!ex.arc_class || a.arc_class == *ex.arc_class) &&
                           (!ex.polarity || a.polarity == *ex.polarity);
                };
                auto removed = std::remove_if(arcs.begin(), arcs.end(), matches);
                if (removed == arcs.end()) {
                    diags_.push_back(error(codes::kUnknownReference,
                                           "no such arc in the region of '" + ev.id.text + "'", ex.span));
                    ok = false;
                }
                arcs.erase(removed, arcs.end());
            }
            if (!ok) continue;
            model_.define_event(ev.id.text, ev.label, std::move(nodes), std::move(arcs), ev.kind);
            spans_.events.push_back(ev.span);
        }

        for (const PendingArc& arc : arcs_) {
            if (!arc.lift || !arc.created) continue;
            auto src = resolve_event(arc.lift->first);
            auto dst = resolve_event(arc.lift->second);
            if (!src || !dst) continue;
            try {
                model_.add_lift_override(*arc.created, *src, *dst);
            } catch (const ModelError& e) {
                diags_.push_back(error(codes::kBadLift, e.what(), arc.span));
            }
        }

        for (const PendingAlias& alias : aliases_) {
            auto src = resolve_event(alias.src);
            auto dst = resolve_event(alias.dst);
            if (!src || !dst) continue;
            bool dup = std::any_of(model_.negative_aliases().begin(), model_.negative_aliases().end(),
                                   [&](const NegativeAlias& a) { return a.name == alias.id.text; }) ||
                       model_.find_event(alias.id.text);
            if (dup) {
                diags_.push_back(error(codes::kDuplicateName, "duplicate id '" + alias.id.text + "'",
                                       cur_.span(alias.id)));
                continue;
            }
            model_.add_negative_alias(NegativeAlias{alias.id.text, alias.label, *src, *dst});
        }
    }

    TokenCursor cur_;
    StaticModel model_;
    bool saw_model_ = false;
    std::vector<Diagnostic> diags_;
    SourceMap spans_;
    std::vector<PendingArc> arcs_;
    std::vector<PendingEvent> events_;
    std::vector<PendingAlias> aliases_;
};

}  // namespace

ModelParse parse_model(std::string_view text, std::string_view origin) {
    auto lexed = detail::lex(text, std::string(origin), codes::kSyntax);
    if (lexed.error) {
        ModelParse out;
        out.diagnostics.push_back(*lexed.error);
        return out;
    }
    return ModelParser(std::move(lexed.tokens), origin).run();
}

std::string_view to_string(Verb v) {
    return v == Verb::Actualize ? "actualize" : "potentialize";
}

ScenarioParse parse_scenario(std::string_view text, const StaticModel& model, std::string_view origin,
                             std::optional<int> slots_override) {
    ScenarioParse out;
    auto lexed = detail::lex(text, std::string(origin), codes::kScenarioSyntax);
    if (lexed.error) {
        out.diagnostics.push_back(*lexed.error);
        return out;
    }
    TokenCursor cur(std::move(lexed.tokens), std::string(origin), codes::kScenarioSyntax);

    struct Raw {
        Directive directive;
        SourceSpan span;
    };
    std::vector<Raw> raws;
    std::optional<int> declared;
    try {
        while (!cur.at_end()) {
            if (cur.accept_punct(";")) continue;
            const Token& kw = cur.peek();
            if (cur.accept_keyword("slots")) {
                if (declared) cur.fail_at(kw, "duplicate slots declaration");
                const Token& n = cur.peek();
                declared = cur.expect_int("a slot count");
                if (*declared < 1) cur.fail_at(n, "slot count must be positive");
            } else if (cur.accept_keyword("at")) {
                Raw raw;
                raw.span = cur.span(kw);
                raw.directive.slot = cur.expect_int("a slot number");
                const Token& verb = cur.expect_ident("'actualize' or 'potentialize'");
                if (verb.text == "actualize") {
                    raw.directive.verb = Verb::Actualize;
                } else if (verb.text == "potentialize") {
                    raw.directive.verb = Verb::Potentialize;
                } else {
                    cur.fail_at(verb, "expected 'actualize' or 'potentialize', found '" + verb.text + "'");
                }
                const Token& ev = cur.expect_ident("an event id");
                bool persist = false;
                if (cur.is_keyword("persist")) {
                    const Token& p = cur.next();
                    if (raw.directive.verb == Verb::Potentialize) {
                        out.diagnostics.push_back(error(codes::kPersistOnPotentialize,
                                                        "'persist' is only valid with actualize", cur.span(p)));
                    }
                    persist = true;
                }
                raw.directive.persist = persist && raw.directive.verb == Verb::Actualize;
                if (auto e = model.find_event(ev.text)) {
                    raw.directive.event = *e;
                    raws.push_back(std::move(raw));
                } else {
                    out.diagnostics.push_back(
                        error(codes::kUnknownEvent, "unknown event '" + ev.text + "'", cur.span(ev)));
                }
            } else {
                cur.fail("expected 'slots' or 'at', found " + TokenCursor::describe(kw));
            }
        }
    } catch (const SyntaxError& e) {
        out.diagnostics.push_back(e.diagnostic);
        return out;
    }

    std::optional<int> horizon = slots_override ? slots_override : declared;
    if (!horizon) {
        out.diagnostics.push_back(error(codes::kScenarioSyntax, "missing 'slots' declaration",
                                        SourceSpan{std::string(origin), 1, 1}));
        return out;
    }
    if (*horizon < 1) {
        out.diagnostics.push_back(error(codes::kSlotOutOfHorizon, "slot count must be positive",
                                        SourceSpan{std::string(origin), 1, 1}));
        return out;
    }
    for (const Raw& r : raws) {
        if (r.directive.slot < 1 || r.directive.slot > *horizon) {
            out.diagnostics.push_back(error(codes::kSlotOutOfHorizon,
                                            "slot " + std::to_string(r.directive.slot) +
                                                " is outside the horizon 1.." + std::to_string(*horizon),
                                            r.span));
        }
    }
    if (has_errors(out.diagnostics)) return out;

    ScenarioScript script;
    script.name = file_stem(origin);
    script.slots = *horizon;
    for (const Raw& r : raws) script.directives.push_back(r.directive);
    std::stable_sort(script.directives.begin(), script.directives.end(),
                     [](const Directive& a, const Directive& b) { return a.slot < b.slot; });
    out.script = std::move(script);
    return out;
}

std::variant<ActionId, Diagnostic> resolve_path(const StaticModel& model, std::string_view path,
                                                const SourceSpan& span) {
    SourceSpan at = span;
    if (at.file.empty()) at.file = "<path>";
    auto lexed = detail::lex(path, at.file, codes::kUnknownReference);
    if (lexed.error) return error(codes::kUnknownReference, "malformed path '" + std::string(path) + "'", at);
    TokenCursor cur(std::move(lexed.tokens), at.file, codes::kUnknownReference);
    try {
        PathRef ref = cur.parse_path();
        if (!cur.at_end()) cur.fail("trailing input");
        ref.span = at;
        return resolve_ref(model, ref);
    } catch (const SyntaxError&) {
        return error(codes::kUnknownReference, "malformed path '" + std::string(path) + "'", at);
    }
}

std::string format_path(const StaticModel& model, ActionId id) {
    const ActionNode& n = model.action(id);
    std::string path = model.path_of(n.owner) + "." + std::string(to_string(n.kind));
    if (!n.label.empty()) {
        if (detail::is_identifier(n.label)) {
            path += ":" + n.label;
        } else {
            std::string quoted = "\"";
            for (char c : n.label) {
                if (c == '"' || c == '\\') quoted.push_back('\\');
                quoted.push_back(c);
            }
            path += ":" + quoted + "\"";
        }
    }
    return path;
}

}  // namespace tmkit

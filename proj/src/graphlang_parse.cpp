#include <charconv>
#include <cmath>
#include <optional>
#include <set>

#include "flow/graphlang.hpp"

namespace flow::graphlang {

using graph::Graph;
using graph::Node;
using graph::NodeKind;
using graph::PinRef;
using graph::PinType;
using graph::Value;
using graph::Wire;

bool ParseResult::ok() const {
    for (const auto& d : diagnostics)
        if (d.severity == Severity::Error) return false;
    return true;
}

namespace {

enum class Tok { Ident, Number, String, Punct, Arrow, Error, End };

struct Token {
    Tok kind = Tok::End;
    std::string_view text;
    SourceSpan span;
    bool line_start = false;  // first token on its line
    double number = 0.0;
    std::string str;          // unescaped string contents or error code
    std::string error;        // message for Tok::Error
};

bool is_ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        bool newline_seen = pos_.offset == 0;
        for (;;) {
            if (at_end()) break;
            const char c = peek();
            if (c == '\n') {
                advance();
                newline_seen = true;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else if (c == '#') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                break;
            }
        }
        Token t;
        t.line_start = newline_seen;
        const SourcePosition begin = pos_;
        if (at_end()) {
            t.kind = Tok::End;
        } else {
            const char c = peek();
            if (is_ident_start(c)) {
                while (!at_end() && is_ident_char(peek())) advance();
                t.kind = Tok::Ident;
            } else if (is_digit(c) || (c == '-' && is_digit(peek(1)))) {
                lex_number(t);
            } else if (c == '-' && peek(1) == '>') {
                advance();
                advance();
                t.kind = Tok::Arrow;
            } else if (c == '"') {
                lex_string(t);
            } else if (std::string_view("{}():,.=").find(c) != std::string_view::npos) {
                advance();
                t.kind = Tok::Punct;
            } else {
                advance();
                t.kind = Tok::Error;
                t.str = "SyntaxError";
                t.error = "unexpected character";
            }
        }
        t.span = {begin, pos_};
        t.text = src_.substr(begin.offset, pos_.offset - begin.offset);
        return t;
    }

private:
    bool at_end() const { return pos_.offset >= src_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_.offset + ahead < src_.size() ? src_[pos_.offset + ahead] : '\0';
    }
    void advance() {
        if (src_[pos_.offset] == '\n') {
            ++pos_.line;
            pos_.column = 1;
        } else {
            ++pos_.column;
        }
        ++pos_.offset;
    }

    void lex_number(Token& t) {
        const std::size_t start = pos_.offset;
        if (peek() == '-') advance();
        while (is_digit(peek())) advance();
        if (peek() == '.' && is_digit(peek(1))) {
            advance();
            while (is_digit(peek())) advance();
        }
        if (peek() == 'e' || peek() == 'E') {
            const std::size_t sign = (peek(1) == '+' || peek(1) == '-') ? 1 : 0;
            if (is_digit(peek(1 + sign))) {
                for (std::size_t i = 0; i <= sign; ++i) advance();
                while (is_digit(peek())) advance();
            }
        }
        const std::string_view text = src_.substr(start, pos_.offset - start);
        // from_chars rejects a leading '+' but accepts '-'.
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t.number);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(t.number)) {
            t.kind = Tok::Error;
            t.str = "BadLiteral";
            t.error = "number out of range";
        } else {
            t.kind = Tok::Number;
        }
    }

    void lex_string(Token& t) {
        advance();  // opening quote
        std::string out;
        for (;;) {
            if (at_end() || peek() == '\n') {
                t.kind = Tok::Error;
                t.str = "BadLiteral";
                t.error = "unterminated string";
                return;
            }
            const char c = peek();
            advance();
            if (c == '"') break;
            if (c != '\\') {
                out.push_back(c);
                continue;
            }
            if (at_end()) continue;  // reported as unterminated on the next pass
            const char e = peek();
            if (e == '\n') continue;
            advance();
            switch (e) {
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                default:
                    if (t.error.empty()) t.error = std::string("unknown escape '\\") + e + "'";
            }
        }
        if (!t.error.empty()) {
            t.kind = Tok::Error;
            t.str = "BadLiteral";
            return;
        }
        t.kind = Tok::String;
        t.str = std::move(out);
    }

    std::string_view src_;
    SourcePosition pos_;
};

struct TooManyErrors {};

struct PendingWire {
    bool exec;
    PinRef from, to;
    SourceSpan from_span, to_span, span;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

    ParseResult run() {
        try {
            parse_file();
            resolve_wires();
        } catch (const TooManyErrors&) {
        }
        result_.graph.nodes = std::move(nodes_);
        return std::move(result_);
    }

private:
    void error(std::string code, std::string message, const SourceSpan& span) {
        result_.diagnostics.push_back({Severity::Error, std::move(code), std::move(message), span});
        if (result_.diagnostics.size() >= kMaxParseErrors) throw TooManyErrors{};
    }

    void bump() { tok_ = lex_.next(); }

    bool is_punct(char c) const { return tok_.kind == Tok::Punct && tok_.text[0] == c; }
    bool is_keyword(std::string_view kw) const { return tok_.kind == Tok::Ident && tok_.text == kw; }

    // Reports the current token as unexpected. Lexer errors keep their own code.
    void unexpected(std::string_view expected) {
        if (tok_.kind == Tok::Error) {
            error(tok_.str, tok_.error, tok_.span);
        } else if (tok_.kind == Tok::End) {
            error("SyntaxError", "expected " + std::string(expected) + " before end of input", tok_.span);
        } else {
            error("SyntaxError",
                  "expected " + std::string(expected) + ", found '" + std::string(tok_.text) + "'",
                  tok_.span);
        }
    }

    bool expect_punct(char c) {
        if (is_punct(c)) {
            bump();
            return true;
        }
        unexpected(std::string("'") + c + "'");
        return false;
    }

    std::optional<Token> expect_ident(std::string_view what) {
        if (tok_.kind == Tok::Ident) {
            Token t = tok_;
            bump();
            return t;
        }
        unexpected(what);
        return std::nullopt;
    }

    bool at_statement_start() const {
        return tok_.line_start && (is_keyword("node") || is_keyword("exec") || is_keyword("data"));
    }

    void recover() {
        do {
            bump();
        } while (tok_.kind != Tok::End && !is_punct('}') && !at_statement_start());
    }

    void parse_file() {
        if (!is_keyword("graph")) {
            unexpected("'graph'");
            return;
        }
        bump();
        if (auto name = expect_ident("graph name")) result_.graph.name = std::string(name->text);
        else return;
        if (!expect_punct('{')) return;
        while (tok_.kind != Tok::End && !is_punct('}')) {
            const std::size_t before = result_.diagnostics.size();
            if (is_keyword("node")) parse_node();
            else if (is_keyword("exec") || is_keyword("data")) parse_wire();
            else unexpected("'node', 'exec', 'data' or '}'");
            if (result_.diagnostics.size() != before && !at_statement_start() && !is_punct('}') &&
                tok_.kind != Tok::End)
                recover();
        }
        if (!is_punct('}')) {
            unexpected("'}'");
            return;
        }
        bump();
        if (tok_.kind != Tok::End) unexpected("end of input");
    }

    std::optional<Value> parse_literal() {
        if (tok_.kind == Tok::Number) {
            const double v = tok_.number;
            bump();
            return v;
        }
        if (tok_.kind == Tok::String) {
            std::string s = std::move(tok_.str);
            bump();
            return s;
        }
        if (is_keyword("true") || is_keyword("false")) {
            const bool b = tok_.text == "true";
            bump();
            return b;
        }
        if (is_punct('(')) {
            bump();
            double xyz[3];
            for (int i = 0; i < 3; ++i) {
                if (i > 0 && !expect_punct(',')) return std::nullopt;
                if (tok_.kind != Tok::Number) {
                    if (tok_.kind == Tok::Error) unexpected("number");
                    else error("BadLiteral", "vector components must be numbers", tok_.span);
                    return std::nullopt;
                }
                xyz[i] = tok_.number;
                bump();
            }
            if (!expect_punct(')')) return std::nullopt;
            return Vec3{xyz[0], xyz[1], xyz[2]};
        }
        if (tok_.kind == Tok::Error) {
            unexpected("literal");
            return std::nullopt;
        }
        error("BadLiteral", "expected a literal, found '" + std::string(tok_.text) + "'", tok_.span);
        return std::nullopt;
    }

    // Checks the literal against the kind's catalog and converts vector literals for rotator pins.
    bool accept_param(const graph::KindSpec* spec, const Token& name, Value& value,
                      const SourceSpan& value_span) {
        if (!spec) return true;  // unknown kind already reported
        std::optional<PinType> expected;
        if (const auto* p = spec->param(name.text)) expected = p->type;
        else if (const auto* d = spec->data_in(name.text)) expected = d->type;
        if (!expected) {
            error("UnknownPin",
                  std::string(spec->name) + " has no parameter or input '" + std::string(name.text) + "'",
                  name.span);
            return false;
        }
        if (*expected == PinType::Rotator && std::holds_alternative<Vec3>(value)) {
            const Vec3 v = std::get<Vec3>(value);
            value = Rotator{v.x, v.y, v.z};
        }
        if (*expected == PinType::ActorRef || graph::type_of(value) != *expected) {
            error("BadLiteral",
                  "'" + std::string(name.text) + "' expects a " + std::string(graph::to_string(*expected)) +
                      " literal",
                  value_span);
            return false;
        }
        return true;
    }

    void parse_node() {
        bump();  // node
        auto id = expect_ident("node id");
        if (!id) return;
        if (!expect_punct(':')) return;
        auto kind = expect_ident("node kind");
        if (!kind) return;

        Node node;
        node.id = std::string(id->text);
        node.kind_name = std::string(kind->text);
        const graph::KindSpec* spec = graph::find_kind(kind->text);
        if (spec) node.kind = spec->kind;
        else error("UnknownKind", "unknown node kind '" + node.kind_name + "'", kind->span);

        SourceSpan span{id->span.begin, kind->span.end};
        bool ok = spec != nullptr;
        if (is_punct('(')) {
            bump();
            bool first = true;
            while (!is_punct(')')) {
                if (!first && !expect_punct(',')) return;
                first = false;
                auto pname = expect_ident("parameter name");
                if (!pname) return;
                if (!expect_punct('=')) return;
                const SourceSpan value_begin = tok_.span;
                auto value = parse_literal();
                if (!value) return;
                const SourceSpan value_span{value_begin.begin, value_begin.end};
                if (node.params.contains(std::string(pname->text))) {
                    error("SyntaxError", "parameter '" + std::string(pname->text) + "' given twice",
                          pname->span);
                    ok = false;
                    continue;
                }
                if (!accept_param(spec, *pname, *value, value_span)) ok = false;
                node.params.emplace(std::string(pname->text), std::move(*value));
            }
            span.end = tok_.span.end;
            bump();  // ')'
        }
        node.span = span;
        if (!declared_.insert(node.id).second) {
            error("DuplicateNodeId", "node id '" + node.id + "' is already declared", id->span);
            return;
        }
        (void)ok;
        nodes_.push_back(std::move(node));
    }

    std::optional<std::pair<PinRef, SourceSpan>> parse_pin_ref() {
        auto node = expect_ident("node id");
        if (!node) return std::nullopt;
        if (!expect_punct('.')) return std::nullopt;
        auto pin = expect_ident("pin name");
        if (!pin) return std::nullopt;
        return std::pair{PinRef{std::string(node->text), std::string(pin->text)},
                         SourceSpan{node->span.begin, pin->span.end}};
    }

    void parse_wire() {
        const bool exec = tok_.text == "exec";
        const SourcePosition begin = tok_.span.begin;
        bump();
        auto from = parse_pin_ref();
        if (!from) return;
        if (tok_.kind != Tok::Arrow) {
            unexpected("'->'");
            return;
        }
        bump();
        auto to = parse_pin_ref();
        if (!to) return;
        pending_.push_back({exec, from->first, to->first, from->second, to->second,
                            SourceSpan{begin, to->second.end}});
    }

    const Node* lookup(const std::string& id) const {
        for (const Node& n : nodes_)
            if (n.id == id) return &n;
        return nullptr;
    }

    // Wires may name nodes declared later, so pins are checked once the body is read.
    void resolve_wires() {
        for (const PendingWire& w : pending_) {
            bool ok = true;
            for (int end = 0; end < 2; ++end) {
                const PinRef& ref = end == 0 ? w.from : w.to;
                const SourceSpan& span = end == 0 ? w.from_span : w.to_span;
                const Node* n = lookup(ref.node);
                if (!n) {
                    error("UnknownPin", "unknown node '" + ref.node + "'", span);
                    ok = false;
                    continue;
                }
                if (n->kind == NodeKind::Unknown) continue;
                const graph::KindSpec& k = graph::spec_of(n->kind);
                bool found;
                if (w.exec) {
                    // Exec wires on pure nodes are left for the validator (ExecIntoPure).
                    found = k.category == graph::NodeCategory::Pure ||
                            (end == 0 ? k.has_exec_out(ref.pin) : (k.exec_in && ref.pin == "in"));
                } else {
                    found = end == 0 ? k.data_out(ref.pin) != nullptr : k.data_in(ref.pin) != nullptr;
                }
                if (!found) {
                    error("UnknownPin",
                          std::string(k.name) + " has no " + (w.exec ? "exec " : "data ") +
                              (end == 0 ? "output" : "input") + " '" + ref.pin + "'",
                          span);
                    ok = false;
                }
            }
            if (!ok) continue;
            (w.exec ? result_.graph.exec_wires : result_.graph.data_wires)
                .push_back(Wire{w.from, w.to, w.span});
        }
    }

    Lexer lex_;
    Token tok_;
    ParseResult result_;
    std::vector<Node> nodes_;
    std::set<std::string> declared_;
    std::vector<PendingWire> pending_;
};

}  // namespace

ParseResult parse(std::string_view source) { return Parser(source).run(); }

std::string format_diagnostic(std::string_view file, std::string_view code, std::string_view message,
                              const SourceSpan& span) {
    std::string out(file);
    out += ':' + std::to_string(span.begin.line) + ':' + std::to_string(span.begin.column) +
           ": error[" + std::string(code) + "]: " + std::string(message);
    return out;
}

}  // namespace flow::graphlang

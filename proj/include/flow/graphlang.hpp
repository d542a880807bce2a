#pragma once

// Text format for node graphs (.fg).
//
//   graph <Name> { <stmt>* }
//   stmt    := node <id> : <Kind> ( <param>=<literal> {, ...} )?
//            | exec <id>.<pin> -> <id>.<pin>
//            | data <id>.<pin> -> <id>.<pin>
//   literal := float | "text" | true | false | (f, f, f)
//
// `#` starts a comment that runs to the end of the line. Identifiers are case-sensitive.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "flow/graph.hpp"
#include "flow/source_span.hpp"

namespace flow::graphlang {

enum class Severity { Error, Warning };

struct ParseDiagnostic {
    Severity severity = Severity::Error;
    std::string code;  // SyntaxError, UnknownKind, UnknownPin, DuplicateNodeId, BadLiteral
    std::string message;
    SourceSpan span;
};

inline constexpr std::size_t kMaxParseErrors = 25;

struct ParseResult {
    graph::Graph graph;  // complete only when ok()
    std::vector<ParseDiagnostic> diagnostics;
    bool ok() const;
};

ParseResult parse(std::string_view source);

/// Canonical text. parse(serialize(g)) is structurally equal to g.
std::string serialize(const graph::Graph& g);

/// Canonical JSON export, schema "fgjson/1".
std::string to_json(const graph::Graph& g);

/// Renders a literal the way serialize does.
std::string format_literal(const graph::Value& v);

/// "file:line:col: error[Code]: message"
std::string format_diagnostic(std::string_view file, std::string_view code, std::string_view message,
                              const SourceSpan& span);

}  // namespace flow::graphlang

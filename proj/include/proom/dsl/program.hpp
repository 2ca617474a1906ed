#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace proom::dsl {

struct VarRef {
  std::string name;
  bool operator==(const VarRef&) const = default;
};

using NumberList = std::vector<double>;
using ValueData = std::variant<std::string, double, NumberList, VarRef>;

/// An argument value. Equality ignores source positions.
struct Value {
  ValueData data;
  int line = 0;
  int column = 0;

  bool operator==(const Value& o) const { return data == o.data; }
};

struct Argument {
  std::string name;
  Value value;
  int column = 0;

  bool operator==(const Argument& o) const { return name == o.name && value == o.value; }
};

struct Statement {
  std::string target;
  std::string module;
  std::vector<Argument> args;  // source order; names unique
  int line = 0;

  const Argument* find(std::string_view name) const;
  bool operator==(const Statement& o) const {
    return target == o.target && module == o.module && args == o.args;
  }
};

struct Program {
  std::vector<Statement> statements;
  std::string source_text;

  /// Structural equality: statements only.
  bool operator==(const Program& o) const { return statements == o.statements; }
};

/// Codes: syntax, empty-program, duplicate-assignment, use-before-assignment,
/// duplicate-argument, unknown-module, missing-argument, unknown-argument,
/// type-mismatch, binding-collision, runtime-error.
struct Diagnostic {
  int line = 0;
  int column = 0;
  std::string code;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

std::string format_diagnostic(const Diagnostic& d);
std::string format_diagnostics(const std::vector<Diagnostic>& list);

struct ParseResult {
  std::optional<Program> program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value() && diagnostics.empty(); }
};

/// Parses one statement per nonblank line. `prebound` names count as already
/// assigned (bindings carried in from an earlier session step).
ParseResult parse_program(std::string_view text, const std::set<std::string>& prebound = {});

/// Canonical text: `T=Module(a='text', b=1.5, c=[1, 2], d=VAR)`, one line per
/// statement, each line newline-terminated.
std::string serialize_program(const Program& program);
std::string serialize_value(const Value& value);
std::string quote_string(std::string_view s);

}  // namespace proom::dsl

#include "proom/dsl/program.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include "proom/util/text.hpp"

namespace proom::dsl {

const Argument* Statement::find(std::string_view name) const {
  for (const auto& a : args)
    if (a.name == name) return &a;
  return nullptr;
}

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream os;
  os << "line " << d.line << ", column " << d.column << ": " << d.code << ": " << d.message;
  return os.str();
}

std::string format_diagnostics(const std::vector<Diagnostic>& list) {
  std::string out;
  for (const auto& d : list) out += format_diagnostic(d) + "\n";
  return out;
}

namespace {

struct SyntaxError {
  int column;
  std::string message;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Recursive-descent parser over a single line. Columns are 1-based.
class LineParser {
 public:
  LineParser(std::string_view line, int line_no) : s_(line), line_(line_no) {}

  Statement parse() {
    Statement st;
    st.line = line_;
    skip_space();
    st.target = ident("variable name");
    skip_space();
    expect('=');
    skip_space();
    st.module = ident("module name");
    skip_space();
    expect('(');
    skip_space();
    if (peek() != ')') {
      while (true) {
        Argument arg;
        arg.column = col();
        arg.name = ident("parameter name");
        skip_space();
        expect('=');
        skip_space();
        arg.value = value();
        st.args.push_back(std::move(arg));
        skip_space();
        if (peek() == ',') {
          ++pos_;
          skip_space();
          continue;
        }
        break;
      }
    }
    expect(')');
    skip_space();
    if (!at_end()) fail("unexpected text after ')'");
    return st;
  }

 private:
  [[noreturn]] void fail(std::string message) { throw SyntaxError{col(), std::move(message)}; }

  int col() const { return static_cast<int>(pos_) + 1; }
  bool at_end() const { return pos_ >= s_.size() || s_[pos_] == '#'; }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  void expect(char c) {
    if (peek() != c) {
      if (at_end()) fail(std::string("expected '") + c + "' before end of line");
      fail(std::string("expected '") + c + "', found '" + peek() + "'");
    }
    ++pos_;
  }

  std::string ident(const char* what) {
    if (!ident_start(peek())) fail(std::string("expected ") + what);
    const std::size_t start = pos_;
    while (ident_char(peek())) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Value value() {
    Value v;
    v.line = line_;
    v.column = col();
    const char c = peek();
    if (c == '\'' || c == '"') {
      v.data = string_literal();
    } else if (c == '[') {
      v.data = number_list();
    } else if (c == '-' || c == '+' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
      v.data = number();
    } else if (ident_start(c)) {
      v.data = VarRef{ident("variable")};
    } else if (at_end()) {
      fail("expected a value before end of line");
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
    return v;
  }

  std::string string_literal() {
    const char quote = s_[pos_++];
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated string");
      const char c = s_[pos_++];
      if (c == quote) break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= s_.size()) fail("unterminated string");
      const char e = s_[pos_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '\\': case '\'': case '"': out.push_back(e); break;
        default: pos_ -= 2; fail(std::string("unknown escape '\\") + e + "'");
      }
    }
    return out;
  }

  double number() {
    const std::size_t start = pos_;
    if (peek() == '-' || peek() == '+') ++pos_;
    bool digits = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_, digits = true;
    if (peek() == '.') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_, digits = true;
    }
    if (!digits) {
      pos_ = start;
      fail("malformed number");
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_++;
      if (peek() == '-' || peek() == '+') ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        pos_ = save;
        fail("malformed exponent");
      }
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if (ident_char(peek())) fail("malformed number");
    std::string_view text = s_.substr(start, pos_ - start);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double out = 0;
    if (!util::parse_number(text, out)) {
      pos_ = start;
      fail("number out of range");
    }
    return out;
  }

  NumberList number_list() {
    expect('[');
    skip_space();
    NumberList out;
    if (peek() == ']') {
      ++pos_;
      return out;
    }
    while (true) {
      const char c = peek();
      if (!(c == '-' || c == '+' || c == '.' || std::isdigit(static_cast<unsigned char>(c))))
        fail("lists hold numbers only");
      out.push_back(number());
      skip_space();
      if (peek() == ',') {
        ++pos_;
        skip_space();
        continue;
      }
      expect(']');
      return out;
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

bool blank_or_comment(std::string_view line) {
  const auto t = util::trim(line);
  return t.empty() || t.front() == '#';
}

}  // namespace

ParseResult parse_program(std::string_view text, const std::set<std::string>& prebound) {
  ParseResult result;
  Program program;
  program.source_text = std::string(text);
  std::map<std::string, int> assigned;  // name -> line
  const auto lines = util::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    if (blank_or_comment(lines[i])) continue;
    Statement st;
    try {
      st = LineParser(lines[i], line_no).parse();
    } catch (const SyntaxError& e) {
      result.diagnostics.push_back({line_no, e.column, "syntax", e.message});
      continue;
    }
    std::set<std::string> arg_names;
    for (const auto& a : st.args) {
      if (!arg_names.insert(a.name).second)
        result.diagnostics.push_back(
            {line_no, a.column, "duplicate-argument", "argument '" + a.name + "' given more than once"});
      if (const auto* ref = std::get_if<VarRef>(&a.value.data)) {
        if (!assigned.count(ref->name) && !prebound.count(ref->name))
          result.diagnostics.push_back({line_no, a.value.column, "use-before-assignment",
                                        "variable '" + ref->name + "' is used before it is assigned"});
      }
    }
    if (auto it = assigned.find(st.target); it != assigned.end()) {
      result.diagnostics.push_back({line_no, 1, "duplicate-assignment",
                                    "variable '" + st.target + "' already assigned on line " +
                                        std::to_string(it->second)});
    } else if (prebound.count(st.target)) {
      result.diagnostics.push_back({line_no, 1, "duplicate-assignment",
                                    "variable '" + st.target + "' is already bound in the environment"});
    } else {
      assigned[st.target] = line_no;
    }
    program.statements.push_back(std::move(st));
  }
  if (program.statements.empty() && result.diagnostics.empty())
    result.diagnostics.push_back({1, 1, "empty-program", "program has no statements"});
  if (result.diagnostics.empty()) result.program = std::move(program);
  return result;
}

std::string quote_string(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

std::string serialize_value(const Value& value) {
  struct Visitor {
    std::string operator()(const std::string& s) const { return quote_string(s); }
    std::string operator()(double d) const { return util::format_number(d); }
    std::string operator()(const NumberList& list) const {
      std::string out = "[";
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out += ", ";
        out += util::format_number(list[i]);
      }
      return out + "]";
    }
    std::string operator()(const VarRef& r) const { return r.name; }
  };
  return std::visit(Visitor{}, value.data);
}

std::string serialize_program(const Program& program) {
  std::string out;
  for (const auto& st : program.statements) {
    out += st.target + "=" + st.module + "(";
    for (std::size_t i = 0; i < st.args.size(); ++i) {
      if (i) out += ", ";
      out += st.args[i].name + "=" + serialize_value(st.args[i].value);
    }
    out += ")\n";
  }
  return out;
}

}  // namespace proom::dsl

#pragma once

#include <any>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "proom/dsl/program.hpp"

namespace proom::dsl {

enum class SemType {
  text,
  number,
  number_list,
  shape,
  layout,
  depth,
  semantic,
  texture,
  room_mesh,
  furniture,
  scene,
  session,
};

const char* type_name(SemType t);
std::optional<SemType> type_from_name(std::string_view name);

class DslError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A typed runtime value. Scalars are stored by value (std::string, double,
/// NumberList); everything else as std::shared_ptr<const T>.
struct RuntimeValue {
  SemType type = SemType::text;
  std::any data;

  template <typename T>
  static RuntimeValue object(SemType type, T value) {
    return {type, std::make_shared<const T>(std::move(value))};
  }
  template <typename T>
  const T& as() const {
    if (const auto* p = std::any_cast<std::shared_ptr<const T>>(&data)) return **p;
    throw DslError(std::string("value of type ") + type_name(type) + " has an unexpected payload");
  }
  const std::string& text() const;
  double number() const;
  const NumberList& numbers() const;
};

RuntimeValue literal_value(const Value& v);

/// Ordered, append-only name -> value bindings.
class Environment {
 public:
  bool contains(const std::string& name) const { return index_.count(name) > 0; }
  const RuntimeValue& at(const std::string& name) const;
  const RuntimeValue* find(const std::string& name) const;
  /// Throws DslError if the name is taken.
  void bind(const std::string& name, RuntimeValue value);
  const std::vector<std::string>& names() const { return order_; }
  std::size_t size() const { return order_.size(); }
  std::map<std::string, SemType> types() const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, RuntimeValue> index_;
};

struct Parameter {
  std::string name;
  SemType type;
  bool required = true;
};

struct Signature {
  std::vector<Parameter> params;
  SemType result;

  const Parameter* find(std::string_view name) const;
};

/// Arguments and context handed to a module handler.
struct CallContext {
  const Statement& statement;
  const Environment& env;
  std::map<std::string, RuntimeValue> args;
  /// Extra bindings to add after the target (used by LoadRoom).
  std::vector<std::pair<std::string, RuntimeValue>> exports;

  bool has(const std::string& name) const { return args.count(name) > 0; }
  const RuntimeValue& arg(const std::string& name) const;
  template <typename T>
  const T& get(const std::string& name) const {
    return arg(name).as<T>();
  }
  std::string text_or(const std::string& name, std::string fallback) const;
  double number_or(const std::string& name, double fallback) const;
};

using Handler = std::function<RuntimeValue(CallContext&)>;

class ModuleRegistry {
 public:
  struct Entry {
    Signature signature;
    Handler handler;
  };

  /// Throws DslError when `name` exists and `replace` is false.
  void register_module(const std::string& name, Signature signature, Handler handler,
                       bool replace = false);
  const Entry* find(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, std::shared_ptr<const Entry>> entries_;
};

/// Empty iff every module exists, required parameters are present, no
/// unknown parameters are passed and all argument types match. `bound`
/// supplies types of variables from a pre-seeded environment.
std::vector<Diagnostic> typecheck(const Program& program, const ModuleRegistry& registry,
                                  const std::map<std::string, SemType>& bound = {});

struct ExecutionResult {
  Environment env;
  int executed = 0;                    // statements completed
  std::optional<Diagnostic> failure;   // set when a statement failed

  bool ok() const { return !failure.has_value(); }
};

/// Runs statements in order against a copy of `env`. Stops at the first
/// failure, keeping the bindings made so far.
ExecutionResult execute(const Program& program, const Environment& env, const ModuleRegistry& registry);

}  // namespace proom::dsl

#include "proom/dsl/runtime.hpp"

#include <array>

namespace proom::dsl {

namespace {

constexpr std::array<std::pair<SemType, const char*>, 12> kTypeNames{{
    {SemType::text, "Text"},
    {SemType::number, "Number"},
    {SemType::number_list, "NumberList"},
    {SemType::shape, "RoomShape"},
    {SemType::layout, "LayoutMap"},
    {SemType::depth, "DepthMap"},
    {SemType::semantic, "SemanticMap"},
    {SemType::texture, "TextureImage"},
    {SemType::room_mesh, "RoomMesh"},
    {SemType::furniture, "FurnitureLayout"},
    {SemType::scene, "Scene"},
    {SemType::session, "Session"},
}};

SemType literal_type(const Value& v) {
  if (std::holds_alternative<std::string>(v.data)) return SemType::text;
  if (std::holds_alternative<double>(v.data)) return SemType::number;
  return SemType::number_list;
}

}  // namespace

const char* type_name(SemType t) {
  for (const auto& [type, name] : kTypeNames)
    if (type == t) return name;
  return "?";
}

std::optional<SemType> type_from_name(std::string_view name) {
  for (const auto& [type, n] : kTypeNames)
    if (name == n) return type;
  return std::nullopt;
}

const std::string& RuntimeValue::text() const {
  if (const auto* p = std::any_cast<std::string>(&data)) return *p;
  throw DslError(std::string("expected Text, got ") + type_name(type));
}

double RuntimeValue::number() const {
  if (const auto* p = std::any_cast<double>(&data)) return *p;
  throw DslError(std::string("expected Number, got ") + type_name(type));
}

const NumberList& RuntimeValue::numbers() const {
  if (const auto* p = std::any_cast<NumberList>(&data)) return *p;
  throw DslError(std::string("expected NumberList, got ") + type_name(type));
}

RuntimeValue literal_value(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v.data)) return {SemType::text, *s};
  if (const auto* d = std::get_if<double>(&v.data)) return {SemType::number, *d};
  if (const auto* l = std::get_if<NumberList>(&v.data)) return {SemType::number_list, *l};
  throw DslError("variable reference is not a literal");
}

const RuntimeValue& Environment::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw DslError("unbound variable '" + name + "'");
  return it->second;
}

const RuntimeValue* Environment::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &it->second;
}

void Environment::bind(const std::string& name, RuntimeValue value) {
  if (index_.count(name)) throw DslError("variable '" + name + "' is already bound");
  index_.emplace(name, std::move(value));
  order_.push_back(name);
}

std::map<std::string, SemType> Environment::types() const {
  std::map<std::string, SemType> out;
  for (const auto& [name, value] : index_) out[name] = value.type;
  return out;
}

const Parameter* Signature::find(std::string_view name) const {
  for (const auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

const RuntimeValue& CallContext::arg(const std::string& name) const {
  auto it = args.find(name);
  if (it == args.end()) throw DslError(statement.module + ": missing argument '" + name + "'");
  return it->second;
}

std::string CallContext::text_or(const std::string& name, std::string fallback) const {
  return has(name) ? arg(name).text() : fallback;
}

double CallContext::number_or(const std::string& name, double fallback) const {
  return has(name) ? arg(name).number() : fallback;
}

void ModuleRegistry::register_module(const std::string& name, Signature signature, Handler handler,
                                     bool replace) {
  if (entries_.count(name) && !replace)
    throw DslError("module '" + name + "' is already registered");
  entries_[name] = std::make_shared<const Entry>(Entry{std::move(signature), std::move(handler)});
}

const ModuleRegistry::Entry* ModuleRegistry::find(const std::string& name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : it->second.get();
}

std::vector<std::string> ModuleRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, entry] : entries_) out.push_back(name);
  return out;
}

std::vector<Diagnostic> typecheck(const Program& program, const ModuleRegistry& registry,
                                  const std::map<std::string, SemType>& bound) {
  std::vector<Diagnostic> out;
  std::map<std::string, std::optional<SemType>> known;
  for (const auto& [name, type] : bound) known[name] = type;
  for (const auto& st : program.statements) {
    const auto* entry = registry.find(st.module);
    if (!entry) {
      out.push_back({st.line, static_cast<int>(st.target.size()) + 2, "unknown-module",
                     "module '" + st.module + "' is not registered"});
      known[st.target] = std::nullopt;
      continue;
    }
    const Signature& sig = entry->signature;
    for (const auto& arg : st.args) {
      const Parameter* param = sig.find(arg.name);
      if (!param) {
        out.push_back({st.line, arg.column, "unknown-argument",
                       st.module + " has no parameter '" + arg.name + "'"});
        continue;
      }
      std::optional<SemType> actual;
      if (const auto* ref = std::get_if<VarRef>(&arg.value.data)) {
        auto it = known.find(ref->name);
        if (it == known.end()) {
          out.push_back({st.line, arg.value.column, "use-before-assignment",
                         "variable '" + ref->name + "' is used before it is assigned"});
          continue;
        }
        actual = it->second;
      } else {
        actual = literal_type(arg.value);
      }
      if (actual && *actual != param->type)
        out.push_back({st.line, arg.value.column, "type-mismatch",
                       st.module + "." + arg.name + " expects " + type_name(param->type) + ", got " +
                           type_name(*actual)});
    }
    for (const auto& p : sig.params)
      if (p.required && !st.find(p.name))
        out.push_back({st.line, static_cast<int>(st.target.size()) + 2, "missing-argument",
                       st.module + " requires '" + p.name + "'"});
    known[st.target] = sig.result;
  }
  return out;
}

ExecutionResult execute(const Program& program, const Environment& env, const ModuleRegistry& registry) {
  ExecutionResult result;
  result.env = env;
  auto diags = typecheck(program, registry, env.types());
  for (const auto& st : program.statements)
    if (env.contains(st.target))
      diags.insert(diags.begin(), {st.line, 1, "binding-collision",
                                   "variable '" + st.target + "' is already bound in the environment"});
  if (!diags.empty()) {
    result.failure = diags.front();
    return result;
  }
  for (const auto& st : program.statements) {
    const auto* entry = registry.find(st.module);
    CallContext ctx{st, result.env, {}, {}};
    try {
      for (const auto& arg : st.args) {
        if (const auto* ref = std::get_if<VarRef>(&arg.value.data)) ctx.args.emplace(arg.name, result.env.at(ref->name));
        else ctx.args.emplace(arg.name, literal_value(arg.value));
      }
      RuntimeValue value = entry->handler(ctx);
      if (value.type != entry->signature.result)
        throw DslError(st.module + " returned " + type_name(value.type) + " instead of " +
                       type_name(entry->signature.result));
      Environment next = result.env;
      next.bind(st.target, std::move(value));
      for (auto& [name, v] : ctx.exports) next.bind(name, std::move(v));
      result.env = std::move(next);
    } catch (const std::exception& e) {
      result.failure = Diagnostic{st.line, 1, "runtime-error", st.module + ": " + e.what()};
      return result;
    }
    ++result.executed;
  }
  return result;
}

}  // namespace proom::dsl

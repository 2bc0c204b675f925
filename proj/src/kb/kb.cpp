#include "eois/kb.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

namespace eois::kb {

// ---------------------------------------------------------------------------
// DomainSort
// ---------------------------------------------------------------------------

DomainSort DomainSort::range(std::string name, Value lo, Value hi) {
  if (hi < lo) throw KbError("sort '" + name + "' is empty");
  DomainSort s;
  s.name_ = std::move(name);
  s.lo_ = lo;
  s.hi_ = hi;
  return s;
}

DomainSort DomainSort::of(std::string name, std::vector<Value> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.empty()) throw KbError("sort '" + name + "' is empty");
  DomainSort s;
  s.name_ = std::move(name);
  s.lo_ = values.front();
  s.hi_ = values.back();
  s.values_ = std::move(values);
  return s;
}

std::uint64_t DomainSort::size() const {
  if (!values_.empty()) return values_.size();
  return static_cast<std::uint64_t>(hi_ - lo_) + 1;
}

bool DomainSort::contains(Value v) const {
  if (!values_.empty()) return std::binary_search(values_.begin(), values_.end(), v);
  return v >= lo_ && v <= hi_;
}

Value DomainSort::at(std::uint64_t i) const {
  if (!values_.empty()) return values_.at(i);
  return lo_ + static_cast<Value>(i);
}

char mode_symbol(Mode m) {
  switch (m) {
    case Mode::In: return '+';
    case Mode::Out: return '-';
    case Mode::Const: return '#';
  }
  return '?';
}

// ---------------------------------------------------------------------------
// BackgroundKB
// ---------------------------------------------------------------------------

SortId BackgroundKB::add_sort(DomainSort sort) {
  if (sort_by_name_.count(sort.name())) throw KbError("duplicate sort '" + sort.name() + "'");
  const auto id = static_cast<SortId>(sorts_.size());
  sort_by_name_.emplace(sort.name(), id);
  sorts_.push_back(std::move(sort));
  return id;
}

PredId BackgroundKB::add_predicate(PredicateSig sig, TestFn test, EnumerateFn enumerate) {
  if (sig.arg_sorts.size() != sig.arg_modes.size())
    throw KbError("predicate '" + sig.name + "': arity mismatch between sorts and modes");
  if (sig.arity() > kMaxArity) throw KbError("predicate '" + sig.name + "': arity too large");
  for (SortId s : sig.arg_sorts)
    if (s >= sorts_.size()) throw KbError("predicate '" + sig.name + "': unknown sort");
  if (pred_by_name_.count(sig.name)) throw KbError("duplicate predicate '" + sig.name + "'");
  const auto id = static_cast<PredId>(preds_.size());
  pred_by_name_.emplace(sig.name, id);
  preds_.push_back(Predicate{std::move(sig), std::move(test), std::move(enumerate),
                             PredicateRole::Background});
  return id;
}

PredId BackgroundKB::add_type_guard(SortId sort) {
  if (auto it = guard_by_sort_.find(sort); it != guard_by_sort_.end()) return it->second;
  PredicateSig sig{sorts_.at(sort).name(), {sort}, {Mode::Out}};
  const PredId id = add_predicate(std::move(sig), [](std::span<const Value>) { return true; });
  preds_[id].role = PredicateRole::TypeGuard;
  guard_by_sort_.emplace(sort, id);
  return id;
}

PredId BackgroundKB::set_target(std::string name, std::vector<SortId> arg_sorts) {
  if (target_) throw KbError("target predicate already declared");
  for (SortId s : arg_sorts) add_type_guard(s);
  std::vector<Mode> modes(arg_sorts.size(), Mode::In);
  const PredId id = add_predicate(PredicateSig{std::move(name), std::move(arg_sorts), std::move(modes)},
                                  TestFn{});
  preds_[id].role = PredicateRole::Target;
  target_ = id;
  return id;
}

void BackgroundKB::add_mode(PredId pred, std::vector<Mode> modes) {
  if (modes.size() != preds_.at(pred).sig.arity())
    throw KbError("mode declaration arity mismatch for '" + preds_[pred].sig.name + "'");
  modes_.push_back(ModeDecl{pred, std::move(modes)});
}

PredId BackgroundKB::target() const {
  if (!target_) throw KbError("no target predicate declared");
  return *target_;
}

std::optional<PredId> BackgroundKB::type_guard_for(SortId sort) const {
  if (auto it = guard_by_sort_.find(sort); it != guard_by_sort_.end()) return it->second;
  return std::nullopt;
}

std::optional<PredId> BackgroundKB::find_predicate(std::string_view name) const {
  if (auto it = pred_by_name_.find(std::string(name)); it != pred_by_name_.end()) return it->second;
  return std::nullopt;
}

std::optional<SortId> BackgroundKB::find_sort(std::string_view name) const {
  if (auto it = sort_by_name_.find(std::string(name)); it != sort_by_name_.end()) return it->second;
  return std::nullopt;
}

bool BackgroundKB::holds(PredId id, std::span<const Value> args) const {
  const Predicate& p = preds_.at(id);
  if (p.role == PredicateRole::Target)
    throw KbError("target predicate '" + p.sig.name + "' has no evaluator");
  if (args.size() != p.sig.arity()) return false;
  for (std::size_t k = 0; k < args.size(); ++k)
    if (!sorts_[p.sig.arg_sorts[k]].contains(args[k])) return false;
  return p.test(args);
}

bool BackgroundKB::solve_atom(PredId id, std::span<const std::optional<Value>> args,
                              Emit emit) const {
  const Predicate& p = preds_.at(id);
  if (p.role == PredicateRole::Target)
    throw KbError("target predicate '" + p.sig.name + "' has no evaluator");
  const std::size_t arity = p.sig.arity();
  std::array<Value, kMaxArity> full{};
  std::array<std::size_t, kMaxArity> open{};
  std::size_t n_open = 0;
  for (std::size_t k = 0; k < arity; ++k) {
    if (args[k]) {
      if (!sorts_[p.sig.arg_sorts[k]].contains(*args[k])) return true;
      full[k] = *args[k];
    } else {
      open[n_open++] = k;
    }
  }
  if (n_open == 0) {
    if (!p.test(std::span<const Value>(full.data(), arity))) return true;
    return emit(std::span<const Value>(full.data(), arity));
  }
  if (p.enumerate) return p.enumerate(args, emit);

  // Odometer over the sorts of the unbound positions.
  std::array<std::uint64_t, kMaxArity> idx{};
  for (std::size_t j = 0; j < n_open; ++j) full[open[j]] = sorts_[p.sig.arg_sorts[open[j]]].at(0);
  for (;;) {
    const std::span<const Value> tuple(full.data(), arity);
    if (p.test(tuple) && !emit(tuple)) return false;
    std::size_t j = n_open;
    while (j > 0) {
      --j;
      const DomainSort& s = sorts_[p.sig.arg_sorts[open[j]]];
      if (++idx[j] < s.size()) {
        full[open[j]] = s.at(idx[j]);
        break;
      }
      idx[j] = 0;
      full[open[j]] = s.at(0);
      if (j == 0) return true;
    }
    if (n_open == 0) return true;
  }
}

// ---------------------------------------------------------------------------
// Clause utilities
// ---------------------------------------------------------------------------

namespace {

template <class F>
void for_each_term(const Clause& c, F&& f) {
  for (const Term& t : c.head.args) f(t);
  for (const Literal& l : c.body)
    for (const Term& t : l.args) f(t);
}

struct ValuesHash {
  std::size_t operator()(const std::vector<Value>& v) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ v.size();
    for (Value x : v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

VarId variable_count(const Clause& clause) {
  VarId n = 0;
  for_each_term(clause, [&](const Term& t) {
    if (t.is_var) n = std::max(n, t.var_id() + 1);
  });
  return n;
}

Clause normalize_variables(const Clause& clause) {
  std::unordered_map<VarId, VarId> map;
  auto rename = [&](Literal lit) {
    for (Term& t : lit.args) {
      if (!t.is_var) continue;
      auto [it, inserted] = map.emplace(t.var_id(), static_cast<VarId>(map.size()));
      t = Term::var(it->second);
    }
    return lit;
  };
  Clause out;
  out.head = rename(clause.head);
  for (const Literal& l : clause.body) out.body.push_back(rename(l));
  return out;
}

std::size_t body_length(const Clause& clause, const BackgroundKB& kb) {
  return static_cast<std::size_t>(std::count_if(clause.body.begin(), clause.body.end(),
                                                [&](const Literal& l) { return !kb.is_type_guard(l.pred); }));
}

bool well_sorted(const Literal& lit, const BackgroundKB& kb) {
  const PredicateSig& sig = kb.predicate(lit.pred).sig;
  if (lit.args.size() != sig.arity()) return false;
  for (std::size_t k = 0; k < lit.args.size(); ++k)
    if (!lit.args[k].is_var && !kb.sort(sig.arg_sorts[k]).contains(lit.args[k].value)) return false;
  return true;
}

std::vector<VarId> head_variables(const Clause& clause) {
  std::vector<VarId> vars;
  for (const Term& t : clause.head.args)
    if (t.is_var && std::find(vars.begin(), vars.end(), t.var_id()) == vars.end())
      vars.push_back(t.var_id());
  return vars;
}

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

namespace {

/// Left-to-right body evaluation with chronological backtracking.  Returns
/// false iff `on_solution` asked to stop.
bool solve_body(const BackgroundKB& kb, std::span<const Literal> body, std::size_t i, Binding& b,
                FunctionRef<bool()> on_solution) {
  if (i == body.size()) return on_solution();
  const Literal& lit = body[i];
  const PredicateSig& sig = kb.predicate(lit.pred).sig;
  const std::size_t arity = lit.args.size();

  std::array<std::optional<Value>, kMaxArity> args;
  std::array<Value, kMaxArity> ground{};
  bool all_bound = true;
  for (std::size_t k = 0; k < arity; ++k) {
    const Term& t = lit.args[k];
    if (!t.is_var) {
      args[k] = t.value;
    } else if (b[t.var_id()]) {
      args[k] = b[t.var_id()];
    } else {
      if (sig.arg_modes[k] == Mode::In)
        throw ModeError("unbound input variable " + variable_name(t.var_id()) + " in literal '" +
                        to_text(lit, kb) + "'");
      all_bound = false;
      continue;
    }
    ground[k] = *args[k];
  }
  if (all_bound) {
    if (!kb.holds(lit.pred, std::span<const Value>(ground.data(), arity))) return true;
    return solve_body(kb, body, i + 1, b, on_solution);
  }

  return kb.solve_atom(lit.pred, std::span<const std::optional<Value>>(args.data(), arity),
                       [&](std::span<const Value> full) {
                         std::array<VarId, kMaxArity> fresh{};
                         std::size_t n_fresh = 0;
                         bool consistent = true;
                         for (std::size_t k = 0; k < arity && consistent; ++k) {
                           const Term& t = lit.args[k];
                           if (!t.is_var) continue;
                           auto& slot = b[t.var_id()];
                           if (!slot) {
                             slot = full[k];
                             fresh[n_fresh++] = t.var_id();
                           } else if (*slot != full[k]) {
                             consistent = false;
                           }
                         }
                         bool keep_going = true;
                         if (consistent) keep_going = solve_body(kb, body, i + 1, b, on_solution);
                         for (std::size_t j = 0; j < n_fresh; ++j) b[fresh[j]].reset();
                         return keep_going;
                       });
}

bool bind_head(const Clause& clause, std::span<const Value> instance, Binding& b) {
  if (instance.size() != clause.head.args.size()) return false;
  for (std::size_t k = 0; k < instance.size(); ++k) {
    const Term& t = clause.head.args[k];
    if (!t.is_var) {
      if (t.value != instance[k]) return false;
      continue;
    }
    auto& slot = b[t.var_id()];
    if (slot && *slot != instance[k]) return false;
    slot = instance[k];
  }
  return true;
}

}  // namespace

std::vector<Binding> evaluate_literal(const Literal& lit, const Binding& binding,
                                      const BackgroundKB& kb) {
  VarId needed = 0;
  for (const Term& t : lit.args)
    if (t.is_var) needed = std::max(needed, t.var_id() + 1);
  Binding b = binding;
  if (b.size() < needed) b.resize(needed);
  std::vector<Binding> out;
  const std::array<Literal, 1> body{lit};
  solve_body(kb, body, 0, b, [&]() {
    out.push_back(b);
    return true;
  });
  return out;
}

bool covers(const Clause& clause, std::span<const Value> instance, const BackgroundKB& kb) {
  Binding b(variable_count(clause));
  if (!bind_head(clause, instance, b)) return false;
  bool found = false;
  solve_body(kb, clause.body, 0, b, [&]() {
    found = true;
    return false;
  });
  return found;
}

bool entails(const Theory& theory, std::span<const Value> instance, const BackgroundKB& kb) {
  return std::any_of(theory.clauses.begin(), theory.clauses.end(),
                     [&](const Clause& c) { return covers(c, instance, kb); });
}

namespace {

struct GenerativityReport {
  std::optional<std::string> message;
  VarId var = 0;
  std::size_t ground_at = 0;  // body prefix length after which every head variable is bound
};

GenerativityReport analyse_generativity(const Clause& clause, const BackgroundKB& kb) {
  GenerativityReport r;
  const VarId n = variable_count(clause);
  std::vector<bool> bound(n, false);
  const std::vector<VarId> head = head_variables(clause);
  auto head_ground = [&]() {
    return std::all_of(head.begin(), head.end(), [&](VarId v) { return bound[v]; });
  };
  if (head_ground()) r.ground_at = 0;
  bool ground_seen = head_ground();
  for (std::size_t i = 0; i < clause.body.size(); ++i) {
    const Literal& lit = clause.body[i];
    const PredicateSig& sig = kb.predicate(lit.pred).sig;
    for (std::size_t k = 0; k < lit.args.size(); ++k) {
      const Term& t = lit.args[k];
      if (t.is_var && sig.arg_modes[k] == Mode::In && !bound[t.var_id()]) {
        r.message = "variable " + variable_name(t.var_id()) + " is consumed by body literal " +
                    std::to_string(i + 1) + " before any literal binds it";
        r.var = t.var_id();
        return r;
      }
    }
    for (const Term& t : lit.args)
      if (t.is_var) bound[t.var_id()] = true;
    if (!ground_seen && head_ground()) {
      ground_seen = true;
      r.ground_at = i + 1;
    }
  }
  for (VarId v : head) {
    if (!bound[v]) {
      r.message = "head variable " + variable_name(v) + " is not bound by any body literal";
      r.var = v;
      return r;
    }
  }
  return r;
}

}  // namespace

std::optional<std::string> generativity_violation(const Clause& clause, const BackgroundKB& kb) {
  return analyse_generativity(clause, kb).message;
}

void check_generative(const Clause& clause, const BackgroundKB& kb) {
  const GenerativityReport r = analyse_generativity(clause, kb);
  if (r.message) throw GenerativityError("clause is not generative: " + *r.message, r.var);
}

std::uint64_t for_each_ground_solution(const Clause& clause, const BackgroundKB& kb,
                                       std::uint64_t limit,
                                       FunctionRef<bool(std::span<const Value>)> emit) {
  const GenerativityReport g = analyse_generativity(clause, kb);
  if (g.message) throw GenerativityError("clause is not generative: " + *g.message, g.var);
  if (limit == 0) return 0;

  const std::span<const Literal> body(clause.body);
  const std::span<const Literal> prefix = body.first(g.ground_at);
  const std::span<const Literal> suffix = body.subspan(g.ground_at);
  Binding b(variable_count(clause));
  std::unordered_set<std::vector<Value>, ValuesHash> seen;
  std::uint64_t emitted = 0;
  std::vector<Value> grounding(clause.head.args.size());

  solve_body(kb, prefix, 0, b, [&]() {
    for (std::size_t k = 0; k < grounding.size(); ++k) {
      const Term& t = clause.head.args[k];
      grounding[k] = t.is_var ? *b[t.var_id()] : t.value;
    }
    if (seen.count(grounding)) return true;
    // With the head ground, the remaining literals are a satisfiability check.
    bool satisfiable = false;
    solve_body(kb, suffix, 0, b, [&]() {
      satisfiable = true;
      return false;
    });
    if (!satisfiable) return true;
    seen.insert(grounding);
    ++emitted;
    if (!emit(grounding)) return false;
    return emitted < limit;
  });
  return emitted;
}

std::vector<std::vector<Value>> ground_solutions(const Clause& clause, const BackgroundKB& kb,
                                                 std::uint64_t limit) {
  std::vector<std::vector<Value>> out;
  for_each_ground_solution(clause, kb, limit, [&](std::span<const Value> g) {
    out.emplace_back(g.begin(), g.end());
    return true;
  });
  return out;
}

}  // namespace eois::kb

#pragma once

// Relational representation shared by the learner, the sampler and the
// domains: finite sorts, mode-annotated predicate signatures, function-free
// literals and clauses, and a background knowledge base whose predicates are
// decided by native evaluators.
//
// Clause bodies are evaluated left to right with chronological backtracking
// over the bindings an evaluator enumerates for unbound arguments.

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "eois/function_ref.hpp"

namespace eois::kb {

using Value = std::int64_t;
using SortId = std::uint32_t;
using PredId = std::uint32_t;
using VarId = std::uint32_t;

inline constexpr std::size_t kMaxArity = 16;

class KbError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input-moded argument was unbound when its literal was evaluated.
class ModeError : public KbError {
 public:
  using KbError::KbError;
};

/// A clause cannot be used as a generator: some head variable is never bound
/// by a body literal (or a body literal consumes a variable before any
/// literal binds it).
class GenerativityError : public KbError {
 public:
  GenerativityError(const std::string& what, VarId var) : KbError(what), var_(var) {}
  VarId variable() const { return var_; }

 private:
  VarId var_;
};

class ParseError : public KbError {
 public:
  using KbError::KbError;
};

/// Finite ordered set of integer constants; either a contiguous range or an
/// explicit sorted list.
class DomainSort {
 public:
  static DomainSort range(std::string name, Value lo, Value hi);
  static DomainSort of(std::string name, std::vector<Value> values);

  const std::string& name() const { return name_; }
  std::uint64_t size() const;
  bool contains(Value v) const;
  Value at(std::uint64_t i) const;
  Value min() const { return at(0); }
  Value max() const { return at(size() - 1); }

 private:
  DomainSort() = default;

  std::string name_;
  Value lo_ = 0;
  Value hi_ = -1;
  std::vector<Value> values_;  // non-empty => explicit list
};

enum class Mode : std::uint8_t { In, Out, Const };

char mode_symbol(Mode m);

struct PredicateSig {
  std::string name;
  std::vector<SortId> arg_sorts;
  std::vector<Mode> arg_modes;

  std::size_t arity() const { return arg_sorts.size(); }
};

struct Term {
  bool is_var = false;
  Value value = 0;  // variable id when is_var

  static Term var(VarId v) { return {true, static_cast<Value>(v)}; }
  static Term constant(Value c) { return {false, c}; }
  VarId var_id() const { return static_cast<VarId>(value); }

  auto operator<=>(const Term&) const = default;
};

struct Literal {
  PredId pred = 0;
  std::vector<Term> args;

  auto operator<=>(const Literal&) const = default;
};

struct Clause {
  Literal head;
  std::vector<Literal> body;

  bool operator==(const Clause&) const = default;
};

struct Theory {
  std::vector<Clause> clauses;

  bool empty() const { return clauses.empty(); }
  bool operator==(const Theory&) const = default;
};

/// Variable -> constant map indexed by VarId.
using Binding = std::vector<std::optional<Value>>;

/// Receives a full argument tuple; return false to stop enumeration.
using Emit = FunctionRef<bool(std::span<const Value>)>;
using TestFn = std::function<bool(std::span<const Value>)>;
/// Enumerates every full tuple agreeing with the bound entries of a partial
/// tuple.  Returns false iff stopped early by the callback.
using EnumerateFn = std::function<bool(std::span<const std::optional<Value>>, Emit)>;

enum class PredicateRole : std::uint8_t { Background, TypeGuard, Target };

struct Predicate {
  PredicateSig sig;
  TestFn test;
  EnumerateFn enumerate;  // optional; sort enumeration + test is the fallback
  PredicateRole role = PredicateRole::Background;
};

/// Saturation-time mode declaration (which arguments are filled from
/// existing variables, which introduce variables, which become constants).
struct ModeDecl {
  PredId pred;
  std::vector<Mode> modes;
};

class BackgroundKB {
 public:
  SortId add_sort(DomainSort sort);
  PredId add_predicate(PredicateSig sig, TestFn test, EnumerateFn enumerate = {});
  /// Unary generator `name(-X)` enumerating a sort; one per sort.
  PredId add_type_guard(SortId sort);
  /// Declares the head predicate; creates type guards for its argument sorts.
  PredId set_target(std::string name, std::vector<SortId> arg_sorts);
  void add_mode(PredId pred, std::vector<Mode> modes);

  const DomainSort& sort(SortId id) const { return sorts_.at(id); }
  const Predicate& predicate(PredId id) const { return preds_.at(id); }
  std::size_t sort_count() const { return sorts_.size(); }
  std::size_t predicate_count() const { return preds_.size(); }
  const std::vector<ModeDecl>& modes() const { return modes_; }

  PredId target() const;
  bool has_target() const { return target_.has_value(); }
  std::optional<PredId> type_guard_for(SortId sort) const;
  bool is_type_guard(PredId id) const { return preds_.at(id).role == PredicateRole::TypeGuard; }
  std::optional<PredId> find_predicate(std::string_view name) const;
  std::optional<SortId> find_sort(std::string_view name) const;

  /// Truth of a ground atom.  Arguments outside their sorts are false.
  bool holds(PredId id, std::span<const Value> args) const;
  /// Enumerates satisfying completions of a partial tuple in deterministic
  /// order.  Returns false iff the callback stopped enumeration.
  bool solve_atom(PredId id, std::span<const std::optional<Value>> args, Emit emit) const;

 private:
  std::vector<DomainSort> sorts_;
  std::vector<Predicate> preds_;
  std::vector<ModeDecl> modes_;
  std::unordered_map<std::string, PredId> pred_by_name_;
  std::unordered_map<std::string, SortId> sort_by_name_;
  std::unordered_map<SortId, PredId> guard_by_sort_;
  std::optional<PredId> target_;
};

// ---------------------------------------------------------------------------
// Clause utilities
// ---------------------------------------------------------------------------

/// 1 + largest variable id in the clause (0 when variable-free).
VarId variable_count(const Clause& clause);

/// Renumbers variables in order of first occurrence (head, then body).
Clause normalize_variables(const Clause& clause);

/// Number of body literals that are not type guards.
std::size_t body_length(const Clause& clause, const BackgroundKB& kb);

/// Checks every constant against the declared sort of its argument.
bool well_sorted(const Literal& lit, const BackgroundKB& kb);

/// Head variables, in head argument order, without duplicates.
std::vector<VarId> head_variables(const Clause& clause);

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

/// All extensions of `binding` under which `lit` holds.  Throws ModeError if
/// an input-moded argument is an unbound variable.
std::vector<Binding> evaluate_literal(const Literal& lit, const Binding& binding,
                                      const BackgroundKB& kb);

/// Does the clause body have a solution once the head is unified with the
/// instance's attribute values?
bool covers(const Clause& clause, std::span<const Value> instance, const BackgroundKB& kb);

/// Some clause covers the instance; the empty theory entails nothing.
bool entails(const Theory& theory, std::span<const Value> instance, const BackgroundKB& kb);

/// Empty when the clause can be run as a generator, otherwise a description
/// of the first violation.
std::optional<std::string> generativity_violation(const Clause& clause, const BackgroundKB& kb);

/// Throws GenerativityError naming the offending variable.
void check_generative(const Clause& clause, const BackgroundKB& kb);

/// Streams distinct head groundings of the clause's success set in
/// evaluation order, at most `limit` of them.  Returns the number emitted.
/// The callback may return false to stop early.
std::uint64_t for_each_ground_solution(const Clause& clause, const BackgroundKB& kb,
                                       std::uint64_t limit,
                                       FunctionRef<bool(std::span<const Value>)> emit);

std::vector<std::vector<Value>> ground_solutions(const Clause& clause, const BackgroundKB& kb,
                                                 std::uint64_t limit);

// ---------------------------------------------------------------------------
// Text form: `good(A,B) :- pred(A,C), other(C,3).`, one clause per line.
// ---------------------------------------------------------------------------

std::string variable_name(VarId v);
std::string to_text(const Literal& lit, const BackgroundKB& kb);
std::string to_text(const Clause& clause, const BackgroundKB& kb);
std::string to_text(const Theory& theory, const BackgroundKB& kb);

Clause parse_clause(std::string_view text, const BackgroundKB& kb);
Theory parse_theory(std::string_view text, const BackgroundKB& kb);

}  // namespace eois::kb

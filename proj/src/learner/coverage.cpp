#include "eois/coverage.hpp"

#include <array>

namespace eois::learn {

CoverageIndex::CoverageIndex(const LabelledData& data, const kb::BackgroundKB& kb)
    : data_(data), kb_(kb), head_arity_(kb.predicate(kb.target()).sig.arity()) {
  head_.pred = kb.target();
  for (std::size_t k = 0; k < head_arity_; ++k) head_.args.push_back(kb::Term::var(static_cast<kb::VarId>(k)));
}

CoverageIndex::Cover CoverageIndex::everything() const {
  return Cover{Bitset(data_.positives.size(), true), Bitset(data_.negatives.size(), true)};
}

bool CoverageIndex::head_ground(const kb::Literal& lit) const {
  for (const kb::Term& t : lit.args)
    if (t.is_var && t.var_id() >= head_arity_) return false;
  return true;
}

const CoverageIndex::Cover& CoverageIndex::literal_cover(const kb::Literal& lit) {
  if (auto it = cache_.find(lit); it != cache_.end()) return it->second;
  Cover c{Bitset(data_.positives.size()), Bitset(data_.negatives.size())};
  std::array<kb::Value, kb::kMaxArity> args{};
  const std::size_t arity = lit.args.size();
  auto eval = [&](const Instance& x) {
    for (std::size_t k = 0; k < arity; ++k) {
      const kb::Term& t = lit.args[k];
      args[k] = t.is_var ? x[t.var_id()] : t.value;
    }
    return kb_.holds(lit.pred, std::span<const kb::Value>(args.data(), arity));
  };
  for (std::size_t i = 0; i < data_.positives.size(); ++i)
    if (eval(data_.positives[i])) c.pos.set(i);
  for (std::size_t i = 0; i < data_.negatives.size(); ++i)
    if (eval(data_.negatives[i])) c.neg.set(i);
  return cache_.emplace(lit, std::move(c)).first->second;
}

void CoverageIndex::filter_by_backtracking(Bitset& bits, const std::vector<Instance>& examples,
                                           const kb::Clause& residual) const {
  std::vector<std::size_t> drop;
  bits.for_each_set([&](std::size_t i) {
    if (!kb::covers(residual, examples[i], kb_)) drop.push_back(i);
  });
  for (std::size_t i : drop) bits.reset(i);
}

const CoverageIndex::Cover& CoverageIndex::component_cover(const std::vector<kb::Literal>& component) {
  if (auto it = components_.find(component); it != components_.end()) return it->second;
  Cover c = everything();
  kb::Clause residual{head_, component};
  filter_by_backtracking(c.pos, data_.positives, residual);
  filter_by_backtracking(c.neg, data_.negatives, residual);
  return components_.emplace(component, std::move(c)).first->second;
}

CoverageIndex::Cover CoverageIndex::restrict(const Cover& within, const std::vector<kb::Literal>& body) {
  Cover out = within;
  std::vector<const kb::Literal*> rest;
  for (const kb::Literal& lit : body) {
    if (head_ground(lit)) {
      const Cover& lc = literal_cover(lit);
      out.pos &= lc.pos;
      out.neg &= lc.neg;
    } else {
      rest.push_back(&lit);
    }
  }
  if (rest.empty()) return out;

  // Union-find over the non-head literals, joined by shared variables.
  std::vector<std::size_t> parent(rest.size());
  for (std::size_t i = 0; i < rest.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::map<kb::VarId, std::size_t> owner;
  for (std::size_t i = 0; i < rest.size(); ++i)
    for (const kb::Term& t : rest[i]->args) {
      if (!t.is_var || t.var_id() < head_arity_) continue;
      auto [it, fresh] = owner.emplace(t.var_id(), i);
      if (!fresh) parent[find(i)] = find(it->second);
    }
  std::map<std::size_t, std::vector<kb::Literal>> groups;
  for (std::size_t i = 0; i < rest.size(); ++i) groups[find(i)].push_back(*rest[i]);
  for (const auto& [root, component] : groups) {
    const Cover& cc = component_cover(component);
    out.pos &= cc.pos;
    out.neg &= cc.neg;
  }
  return out;
}

CoverageIndex::Cover CoverageIndex::cover(const kb::Clause& clause, const Cover& within) {
  if (clause.head != head_) {
    // Fall back to direct evaluation for clauses with another head shape.
    Cover out = within;
    filter_by_backtracking(out.pos, data_.positives, clause);
    filter_by_backtracking(out.neg, data_.negatives, clause);
    return out;
  }
  return restrict(within, clause.body);
}

}  // namespace eois::learn

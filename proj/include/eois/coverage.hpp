#pragma once

#include <map>
#include <utility>
#include <vector>

#include "eois/bitset.hpp"
#include "eois/kb.hpp"
#include "eois/learner.hpp"

namespace eois::learn {

/// Coverage sets over a fixed labelled example set.  Clauses handled here
/// have the head `target(V0,...,V(h-1))`, so a literal whose variables are
/// all head variables is a pure test of the example; its coverage is
/// computed once and cached as a bitset.  Literals that mention other
/// variables are grouped into components linked by those variables; each
/// component is solved by backtracking over all examples once and cached,
/// since components share only head variables and are independent tests.
class CoverageIndex {
 public:
  struct Cover {
    Bitset pos;
    Bitset neg;
    std::size_t pos_count() const { return pos.count(); }
    std::size_t neg_count() const { return neg.count(); }
  };

  CoverageIndex(const LabelledData& data, const kb::BackgroundKB& kb);

  const LabelledData& data() const { return data_; }
  std::size_t head_arity() const { return head_arity_; }

  Cover everything() const;

  bool head_ground(const kb::Literal& lit) const;
  const Cover& literal_cover(const kb::Literal& lit);

  /// Examples in `within` that satisfy the conjunction `body`.
  Cover restrict(const Cover& within, const std::vector<kb::Literal>& body);

  /// Examples in `within` covered by `clause`; the head must be
  /// target(V0..V(h-1)).
  Cover cover(const kb::Clause& clause, const Cover& within);

 private:
  void filter_by_backtracking(Bitset& bits, const std::vector<Instance>& examples,
                              const kb::Clause& residual) const;
  const Cover& component_cover(const std::vector<kb::Literal>& component);

  const LabelledData& data_;
  const kb::BackgroundKB& kb_;
  std::size_t head_arity_;
  kb::Literal head_;
  std::map<kb::Literal, Cover> cache_;
  std::map<std::vector<kb::Literal>, Cover> components_;
};

}  // namespace eois::learn

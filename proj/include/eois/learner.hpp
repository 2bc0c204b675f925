#pragma once

// Mode-directed clause learning: saturation of a seed example into a bottom
// clause, bounded best-first search over ordered subsets of the bottom
// clause's body with a precision floor, and sequential covering.

#include <cstdint>
#include <optional>
#include <vector>

#include "eois/bitset.hpp"
#include "eois/kb.hpp"

namespace eois::learn {

using Instance = std::vector<kb::Value>;

struct LearnerConfig {
  double minacc = 0.7;
  std::size_t max_clause_literals = 4;  // background literals; type guards are not counted
  std::size_t max_search_nodes = 5000;
  std::size_t variable_depth = 2;

  /// Empty when valid; otherwise one message per offending field.
  std::vector<std::string> validate() const;
};

struct LabelledData {
  std::vector<Instance> positives;
  std::vector<Instance> negatives;
};

struct ClauseScore {
  std::size_t pos = 0;
  std::size_t neg = 0;

  bool has_precision() const { return pos + neg > 0; }
  double precision() const { return has_precision() ? double(pos) / double(pos + neg) : 0.0; }
  long compression(std::size_t body_len) const {
    return static_cast<long>(pos) - static_cast<long>(neg) - static_cast<long>(body_len);
  }
};

/// Inclusive precision floor, robust to binary rounding of minacc.
bool meets_minacc(const ClauseScore& s, double minacc);

struct SearchStats {
  std::size_t nodes = 0;   // expansions, root included
  std::size_t scored = 0;  // clauses whose coverage was computed
};

/// A learned clause with its score at construction time (positives counted
/// among those still uncovered when it was found).
struct ClauseReport {
  kb::Clause clause;
  ClauseScore score;
  std::size_t body_length = 0;
  long compression = 0;
  std::size_t nodes = 0;
};

struct InduceResult {
  kb::Theory theory;
  std::vector<ClauseReport> clauses;
  std::vector<std::size_t> ungeneralised;  // indices into LabelledData::positives
  std::size_t searches = 0;
  std::size_t total_nodes = 0;
  std::size_t max_nodes_per_search = 0;
};

/// Most specific clause (without type guards) true of the seed, built from
/// the kb's mode declarations to the configured variable depth.  Head
/// variables are V0..V(h-1) in argument order.
kb::Clause saturate(const Instance& seed, const kb::BackgroundKB& kb, const LearnerConfig& cfg);

/// Variables a bottom-clause literal consumes: those at input positions of
/// the first mode declaration matching it.
std::vector<kb::VarId> literal_inputs(const kb::Literal& lit, const kb::BackgroundKB& kb);

/// Inserts a type guard for each head variable just before its first use;
/// unused head variables get their guards at the end.
kb::Clause make_generative(const kb::Literal& head, const std::vector<kb::Literal>& body,
                           const kb::BackgroundKB& kb);

/// Best acceptable refinement of the empty clause towards `bottom`, or none.
std::optional<kb::Clause> search_clause(const kb::Clause& bottom, const LabelledData& data,
                                        const kb::BackgroundKB& kb, const LearnerConfig& cfg,
                                        SearchStats* stats = nullptr);

InduceResult induce(const LabelledData& data, const kb::BackgroundKB& kb, const LearnerConfig& cfg);

/// Coverage counts by direct evaluation with kb::covers.
ClauseScore score_clause(const kb::Clause& clause, const LabelledData& data,
                         const kb::BackgroundKB& kb);

}  // namespace eois::learn

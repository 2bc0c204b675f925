#include "eois/learner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "eois/coverage.hpp"

namespace eois::learn {

std::vector<std::string> LearnerConfig::validate() const {
  std::vector<std::string> errors;
  if (!(minacc > 0.0 && minacc <= 1.0)) errors.push_back("learner.minacc must be in (0, 1]");
  if (max_clause_literals < 1) errors.push_back("learner.max_clause_literals must be >= 1");
  if (max_search_nodes < 1) errors.push_back("learner.max_search_nodes must be >= 1");
  if (variable_depth < 1) errors.push_back("learner.variable_depth must be >= 1");
  return errors;
}

bool meets_minacc(const ClauseScore& s, double minacc) {
  if (!s.has_precision()) return false;
  return double(s.pos) >= minacc * double(s.pos + s.neg) - 1e-9;
}

// ---------------------------------------------------------------------------
// Saturation
// ---------------------------------------------------------------------------

namespace {

struct SatVar {
  kb::SortId sort;
  kb::Value value;
  std::size_t depth;
};

}  // namespace

kb::Clause saturate(const Instance& seed, const kb::BackgroundKB& kb, const LearnerConfig& cfg) {
  const kb::PredicateSig& target = kb.predicate(kb.target()).sig;
  if (seed.size() != target.arity()) throw kb::KbError("seed does not match the target arity");

  std::vector<SatVar> vars;
  kb::Clause bottom;
  bottom.head.pred = kb.target();
  for (std::size_t k = 0; k < target.arity(); ++k) {
    vars.push_back({target.arg_sorts[k], seed[k], 0});
    bottom.head.args.push_back(kb::Term::var(static_cast<kb::VarId>(k)));
  }

  std::set<kb::Literal> seen;
  for (std::size_t layer = 1; layer <= cfg.variable_depth; ++layer) {
    const std::size_t usable = vars.size();  // variables introduced in this layer wait for the next
    for (const kb::ModeDecl& md : kb.modes()) {
      const kb::PredicateSig& sig = kb.predicate(md.pred).sig;
      const std::size_t arity = sig.arity();

      std::vector<std::size_t> in_pos;
      std::vector<std::vector<kb::VarId>> candidates;
      for (std::size_t k = 0; k < arity; ++k) {
        if (md.modes[k] != kb::Mode::In) continue;
        in_pos.push_back(k);
        std::vector<kb::VarId> c;
        for (std::size_t v = 0; v < usable; ++v)
          if (vars[v].sort == sig.arg_sorts[k] && vars[v].depth < layer) c.push_back(static_cast<kb::VarId>(v));
        candidates.push_back(std::move(c));
      }
      if (in_pos.empty() && layer > 1) continue;
      if (std::any_of(candidates.begin(), candidates.end(), [](const auto& c) { return c.empty(); })) continue;

      std::vector<std::size_t> pick(in_pos.size(), 0);
      for (;;) {
        // Only combinations touching the newest layer are new.
        bool fresh_combo = layer == 1;
        std::array<std::optional<kb::Value>, kb::kMaxArity> partial;
        std::array<kb::VarId, kb::kMaxArity> in_var{};
        for (std::size_t j = 0; j < in_pos.size(); ++j) {
          const kb::VarId v = candidates[j][pick[j]];
          in_var[in_pos[j]] = v;
          partial[in_pos[j]] = vars[v].value;
          if (vars[v].depth == layer - 1) fresh_combo = true;
        }
        if (fresh_combo) {
          std::vector<std::vector<kb::Value>> tuples;
          kb.solve_atom(md.pred, std::span<const std::optional<kb::Value>>(partial.data(), arity),
                        [&](std::span<const kb::Value> full) {
                          tuples.emplace_back(full.begin(), full.end());
                          return true;
                        });
          for (const auto& full : tuples) {
            // Output arguments become every existing variable carrying the
            // same value, or a fresh variable if none does.
            std::vector<std::vector<kb::Term>> choices(arity);
            for (std::size_t k = 0; k < arity; ++k) {
              switch (md.modes[k]) {
                case kb::Mode::In: choices[k] = {kb::Term::var(in_var[k])}; break;
                case kb::Mode::Const: choices[k] = {kb::Term::constant(full[k])}; break;
                case kb::Mode::Out: {
                  for (std::size_t v = 0; v < vars.size(); ++v)
                    if (vars[v].sort == sig.arg_sorts[k] && vars[v].value == full[k])
                      choices[k].push_back(kb::Term::var(static_cast<kb::VarId>(v)));
                  if (choices[k].empty()) {
                    vars.push_back({sig.arg_sorts[k], full[k], layer});
                    choices[k].push_back(kb::Term::var(static_cast<kb::VarId>(vars.size() - 1)));
                  }
                  break;
                }
              }
            }
            std::vector<std::size_t> ci(arity, 0);
            for (;;) {
              kb::Literal lit;
              lit.pred = md.pred;
              for (std::size_t k = 0; k < arity; ++k) lit.args.push_back(choices[k][ci[k]]);
              if (seen.insert(lit).second) bottom.body.push_back(std::move(lit));
              std::size_t k = arity;
              while (k > 0) {
                --k;
                if (++ci[k] < choices[k].size()) break;
                ci[k] = 0;
                if (k == 0) goto next_tuple;
              }
              if (arity == 0) break;
            }
          next_tuple:;
          }
        }
        std::size_t j = in_pos.size();
        while (j > 0) {
          --j;
          if (++pick[j] < candidates[j].size()) break;
          pick[j] = 0;
          if (j == 0) goto next_mode;
        }
        if (in_pos.empty()) break;
      }
    next_mode:;
    }
  }
  return bottom;
}

std::vector<kb::VarId> literal_inputs(const kb::Literal& lit, const kb::BackgroundKB& kb) {
  const kb::ModeDecl* match = nullptr;
  for (const kb::ModeDecl& md : kb.modes()) {
    if (md.pred != lit.pred) continue;
    bool ok = true;
    for (std::size_t k = 0; k < lit.args.size() && ok; ++k) {
      const bool is_const = !lit.args[k].is_var;
      ok = is_const == (md.modes[k] == kb::Mode::Const);
    }
    if (ok) {
      match = &md;
      break;
    }
  }
  const std::vector<kb::Mode>& modes = match ? match->modes : kb.predicate(lit.pred).sig.arg_modes;
  std::vector<kb::VarId> in;
  for (std::size_t k = 0; k < lit.args.size(); ++k)
    if (lit.args[k].is_var && modes[k] == kb::Mode::In) in.push_back(lit.args[k].var_id());
  return in;
}

kb::Clause make_generative(const kb::Literal& head, const std::vector<kb::Literal>& body,
                           const kb::BackgroundKB& kb) {
  const kb::PredicateSig& target = kb.predicate(head.pred).sig;
  std::map<kb::VarId, kb::SortId> head_sort;
  for (std::size_t k = 0; k < head.args.size(); ++k)
    if (head.args[k].is_var) head_sort.emplace(head.args[k].var_id(), target.arg_sorts[k]);

  std::set<kb::VarId> guarded;
  kb::Clause c;
  c.head = head;
  auto guard = [&](kb::VarId v) {
    if (!head_sort.count(v) || !guarded.insert(v).second) return;
    const auto g = kb.type_guard_for(head_sort.at(v));
    if (!g) throw kb::KbError("no type guard for head sort");
    c.body.push_back(kb::Literal{*g, {kb::Term::var(v)}});
  };
  for (const kb::Literal& lit : body) {
    for (const kb::Term& t : lit.args)
      if (t.is_var) guard(t.var_id());
    c.body.push_back(lit);
  }
  for (const kb::Term& t : head.args)
    if (t.is_var) guard(t.var_id());
  return c;
}

ClauseScore score_clause(const kb::Clause& clause, const LabelledData& data, const kb::BackgroundKB& kb) {
  ClauseScore s;
  for (const Instance& x : data.positives) s.pos += kb::covers(clause, x, kb);
  for (const Instance& x : data.negatives) s.neg += kb::covers(clause, x, kb);
  return s;
}

// ---------------------------------------------------------------------------
// Clause search
// ---------------------------------------------------------------------------

namespace {

struct Node {
  std::vector<std::uint16_t> picks;  // increasing indices into the candidate list
  CoverageIndex::Cover cover;
  std::size_t pos = 0;
  std::size_t neg = 0;
  long compression = 0;
};

/// Strict preference: higher compression, then fewer literals, then the
/// lexicographically smaller pick sequence.
bool preferred(long ca, const std::vector<std::uint16_t>& a, long cb, const std::vector<std::uint16_t>& b) {
  if (ca != cb) return ca > cb;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

struct QueueOrder {
  const std::vector<Node>* nodes;
  bool operator()(std::size_t x, std::size_t y) const {
    const Node& a = (*nodes)[x];
    const Node& b = (*nodes)[y];
    return preferred(b.compression, b.picks, a.compression, a.picks);
  }
};

struct SearchOutcome {
  std::optional<std::vector<std::uint16_t>> best;
  ClauseScore score;
  long compression = 0;
  std::size_t nodes = 0;   // expansions
  std::size_t scored = 0;  // clauses evaluated
};

SearchOutcome run_search(const kb::Clause& bottom, CoverageIndex& index,
                         const CoverageIndex::Cover& root_cover, const kb::BackgroundKB& kb,
                         const LearnerConfig& cfg) {
  const std::size_t h = index.head_arity();
  const std::vector<kb::Literal>& cand = bottom.body;
  std::vector<std::vector<kb::VarId>> inputs;
  std::vector<bool> ground;
  inputs.reserve(cand.size());
  for (const kb::Literal& lit : cand) {
    inputs.push_back(literal_inputs(lit, kb));
    ground.push_back(index.head_ground(lit));
  }
  const kb::VarId nvars = std::max<kb::VarId>(kb::variable_count(bottom), static_cast<kb::VarId>(h));

  SearchOutcome out;
  std::vector<Node> nodes;
  std::priority_queue<std::size_t, std::vector<std::size_t>, QueueOrder> open(QueueOrder{&nodes});

  auto consider = [&](Node&& n) {
    ++out.scored;
    const ClauseScore s{n.pos, n.neg};
    if (n.pos >= 1 && n.picks.size() <= cfg.max_clause_literals && meets_minacc(s, cfg.minacc)) {
      if (!out.best || preferred(n.compression, n.picks, out.compression, *out.best)) {
        out.best = n.picks;
        out.score = s;
        out.compression = n.compression;
      }
    }
    if (n.pos == 0 || n.picks.size() >= cfg.max_clause_literals) return;
    nodes.push_back(std::move(n));
    open.push(nodes.size() - 1);
  };

  {
    Node root;
    root.cover = root_cover;
    root.pos = root_cover.pos_count();
    root.neg = root_cover.neg_count();
    root.compression = static_cast<long>(root.pos) - static_cast<long>(root.neg);
    consider(std::move(root));
  }

  std::vector<bool> bound(nvars, false);
  while (!open.empty() && out.nodes < cfg.max_search_nodes) {
    const std::size_t id = open.top();
    open.pop();
    const std::size_t len = nodes[id].picks.size();
    if (len >= cfg.max_clause_literals) continue;
    // No refinement can beat the incumbent: P' <= P, N' >= 0, length grows.
    if (out.best) {
      const long bound_c = static_cast<long>(nodes[id].pos) - static_cast<long>(len + 1);
      if (bound_c < out.compression || (bound_c == out.compression && len + 1 > out.best->size())) continue;
    }
    ++out.nodes;

    std::fill(bound.begin(), bound.end(), false);
    for (std::size_t v = 0; v < h; ++v) bound[v] = true;
    std::vector<kb::Literal> nonground;
    for (std::uint16_t p : nodes[id].picks) {
      for (const kb::Term& t : cand[p].args)
        if (t.is_var) bound[t.var_id()] = true;
      if (!ground[p]) nonground.push_back(cand[p]);
    }
    const std::size_t start = nodes[id].picks.empty() ? 0 : nodes[id].picks.back() + 1u;
    for (std::size_t j = start; j < cand.size(); ++j) {
      if (!std::all_of(inputs[j].begin(), inputs[j].end(), [&](kb::VarId v) { return bound[v]; })) continue;
      Node child;
      child.picks = nodes[id].picks;
      child.picks.push_back(static_cast<std::uint16_t>(j));
      if (ground[j]) {
        const CoverageIndex::Cover& lc = index.literal_cover(cand[j]);
        child.cover.pos.assign_and(nodes[id].cover.pos, lc.pos);
        child.cover.neg.assign_and(nodes[id].cover.neg, lc.neg);
      } else {
        std::vector<kb::Literal> body = nonground;
        body.push_back(cand[j]);
        child.cover = index.restrict(nodes[id].cover, body);
      }
      child.pos = child.cover.pos_count();
      child.neg = child.cover.neg_count();
      child.compression = static_cast<long>(child.pos) - static_cast<long>(child.neg) -
                          static_cast<long>(child.picks.size());
      consider(std::move(child));
    }
  }
  return out;
}

std::optional<kb::Clause> assemble(const kb::Clause& bottom, const std::vector<std::uint16_t>& picks,
                                   const kb::BackgroundKB& kb) {
  std::vector<kb::Literal> body;
  for (std::uint16_t p : picks) body.push_back(bottom.body[p]);
  kb::Clause c = kb::normalize_variables(make_generative(bottom.head, body, kb));
  kb::check_generative(c, kb);
  return c;
}

}  // namespace

std::optional<kb::Clause> search_clause(const kb::Clause& bottom, const LabelledData& data,
                                        const kb::BackgroundKB& kb, const LearnerConfig& cfg,
                                        SearchStats* stats) {
  if (bottom.body.size() > 0xffff) throw kb::KbError("bottom clause too large");
  CoverageIndex index(data, kb);
  const SearchOutcome r = run_search(bottom, index, index.everything(), kb, cfg);
  if (stats) {
    stats->nodes = r.nodes;
    stats->scored = r.scored;
  }
  if (!r.best) return std::nullopt;
  return assemble(bottom, *r.best, kb);
}

InduceResult induce(const LabelledData& data, const kb::BackgroundKB& kb, const LearnerConfig& cfg) {
  InduceResult result;
  if (data.positives.empty()) return result;

  CoverageIndex index(data, kb);
  const CoverageIndex::Cover all = index.everything();
  Bitset remaining(data.positives.size(), true);

  for (std::size_t seed = 0; seed < data.positives.size(); ++seed) {
    if (!remaining.test(seed)) continue;
    const kb::Clause bottom = saturate(data.positives[seed], kb, cfg);
    if (bottom.body.size() > 0xffff) throw kb::KbError("bottom clause too large");

    // Positives already covered no longer count; negatives always do.
    const CoverageIndex::Cover root{remaining, all.neg};
    const SearchOutcome r = run_search(bottom, index, root, kb, cfg);
    ++result.searches;
    result.total_nodes += r.nodes;
    result.max_nodes_per_search = std::max(result.max_nodes_per_search, r.nodes);
    if (!r.best) {
      result.ungeneralised.push_back(seed);
      continue;
    }
    kb::Clause clause = *assemble(bottom, *r.best, kb);
    std::vector<kb::Literal> picked;
    for (std::uint16_t p : *r.best) picked.push_back(bottom.body[p]);
    const CoverageIndex::Cover covered = index.restrict(all, picked);
    remaining.subtract(covered.pos);

    ClauseReport rep;
    rep.clause = clause;
    rep.score = r.score;
    rep.body_length = r.best->size();
    rep.compression = r.compression;
    rep.nodes = r.nodes;
    result.clauses.push_back(std::move(rep));
    result.theory.clauses.push_back(std::move(clause));
  }
  // A failed seed may still be covered by a clause found from a later seed.
  std::erase_if(result.ungeneralised, [&](std::size_t i) { return remaining.test(i) == false; });
  return result;
}

}  // namespace eois::learn

#include <algorithm>
#include <cstdlib>

#include "eois/chess.hpp"
#include "eois/learner.hpp"

namespace eois::chess {

bool strictly_between(Square a, Square mid, Square b) {
  const int df = b.file - a.file, dr = b.rank - a.rank;
  if (a == b || !(df == 0 || dr == 0 || std::abs(df) == std::abs(dr))) return false;
  const int steps = std::max(std::abs(df), std::abs(dr));
  const int sf = (df > 0) - (df < 0), sr = (dr > 0) - (dr < 0);
  for (int i = 1; i < steps; ++i)
    if (Square{a.file + i * sf, a.rank + i * sr} == mid) return true;
  return false;
}

bool kings_in_opposition(Square wk, Square bk) {
  const int df = std::abs(wk.file - bk.file), dr = std::abs(wk.rank - bk.rank);
  return (df == 0 && dr == 2) || (df == 2 && dr == 0);
}

bool kings_almost_in_opposition(Square wk, Square bk) {
  const int df = std::abs(wk.file - bk.file), dr = std::abs(wk.rank - bk.rank);
  return (df == 1 && dr == 2) || (df == 2 && dr == 1);
}

bool l_pattern(const KrkPosition& p) {
  return (p.wr.rank == p.bk.rank && p.wk.file == p.bk.file) || (p.wr.file == p.bk.file && p.wk.rank == p.bk.rank);
}

int edge_distance(Square s) { return std::min({s.file - 1, 8 - s.file, s.rank - 1, 8 - s.rank}); }

int corner_distance(Square s) {
  return std::min(s.file - 1, 8 - s.file) + std::min(s.rank - 1, 8 - s.rank);
}

int centre_distance(Square s) {
  const int f = std::max({0, 4 - s.file, s.file - 5});
  const int r = std::max({0, 4 - s.rank, s.rank - 5});
  return std::max(f, r);
}

int alignment_distance(Square a, Square b) { return std::min(std::abs(a.file - b.file), std::abs(a.rank - b.rank)); }

std::string background_name(Background b) { return b == Background::Low ? "low" : "high"; }

std::optional<Background> parse_background(const std::string& name) {
  if (name == "high") return Background::High;
  if (name == "low") return Background::Low;
  return std::nullopt;
}

namespace {

enum Piece { WK = 0, WR = 1, BK = 2 };
constexpr const char* kPieceName[3] = {"wk", "wr", "bk"};

Square piece(std::span<const kb::Value> a, int slot) {
  return {static_cast<int>(a[2 * slot]), static_cast<int>(a[2 * slot + 1])};
}

class HighBuilder {
 public:
  HighBuilder() {
    for (int p = 0; p < 3; ++p) {
      for (const char* axis : {"file", "rank"})
        coord_[p].push_back(kb_.add_sort(kb::DomainSort::range(std::string(kPieceName[p]) + "_" + axis, 1, 8)));
    }
    std::vector<kb::SortId> head;
    for (int p = 0; p < 3; ++p) head.insert(head.end(), coord_[p].begin(), coord_[p].end());
    kb_.set_target("good", head);
  }

  using Feature = int (*)(const std::array<Square, 3>&);

  /// A numeric feature over the listed pieces with values 0..max, exposed
  /// as f(..., V), f_le(..., C) and f_ge(..., C).  Threshold constants that
  /// would make the atom true of every position are left out of their sorts.
  void numeric(const std::string& name, std::vector<int> pieces, int max, Feature f) {
    add_numeric(name, "eq", pieces, 0, max, f, [](int v, int c) { return v == c; });
    add_numeric(name + "_le", "le", pieces, 0, max - 1, f, [](int v, int c) { return v <= c; });
    add_numeric(name + "_ge", "ge", pieces, 1, max, f, [](int v, int c) { return v >= c; });
  }

  using Test = bool (*)(const std::array<Square, 3>&);

  void boolean(const std::string& name, std::vector<int> pieces, Test t) {
    kb::PredicateSig sig{name, {}, {}};
    for (int p : pieces) append_piece(sig, p);
    const std::size_t arity = sig.arity();
    const kb::PredId id = kb_.add_predicate(std::move(sig), [pieces, t](std::span<const kb::Value> a) {
      return t(squares(pieces, a));
    });
    kb_.add_mode(id, std::vector<kb::Mode>(arity, kb::Mode::In));
  }

  kb::BackgroundKB take() { return std::move(kb_); }

 private:
  static std::array<Square, 3> squares(const std::vector<int>& pieces, std::span<const kb::Value> a) {
    std::array<Square, 3> sq{};
    for (std::size_t j = 0; j < pieces.size(); ++j) sq[static_cast<std::size_t>(pieces[j])] = piece(a, int(j));
    return sq;
  }

  void append_piece(kb::PredicateSig& sig, int p) {
    for (kb::SortId s : coord_[p]) {
      sig.arg_sorts.push_back(s);
      sig.arg_modes.push_back(kb::Mode::In);
    }
  }

  kb::SortId value_sort(const std::string& kind, int lo, int hi) {
    const std::string name = kind + std::to_string(lo) + "_" + std::to_string(hi);
    if (auto s = kb_.find_sort(name)) return *s;
    return kb_.add_sort(kb::DomainSort::range(name, lo, hi));
  }

  void add_numeric(const std::string& name, const std::string& kind, const std::vector<int>& pieces, int lo, int hi,
                   Feature f, bool (*cmp)(int, int)) {
    if (hi < lo) return;
    kb::PredicateSig sig{name, {}, {}};
    for (int p : pieces) append_piece(sig, p);
    const std::size_t vpos = sig.arity();
    sig.arg_sorts.push_back(value_sort(kind, lo, hi));
    sig.arg_modes.push_back(kb::Mode::Out);
    const std::size_t arity = sig.arity();

    auto test = [pieces, f, cmp, vpos](std::span<const kb::Value> a) {
      return cmp(f(squares(pieces, a)), static_cast<int>(a[vpos]));
    };
    // Coordinates are inputs, so only the value can be open.
    auto enumerate = [pieces, f, cmp, vpos, lo, hi, arity](std::span<const std::optional<kb::Value>> args,
                                                            kb::Emit emit) {
      std::array<kb::Value, kb::kMaxArity> full{};
      for (std::size_t k = 0; k < vpos; ++k) {
        if (!args[k]) throw kb::ModeError("chess feature evaluated with an unbound coordinate");
        full[k] = *args[k];
      }
      const int v = f(squares(pieces, std::span<const kb::Value>(full.data(), vpos)));
      for (int c = lo; c <= hi; ++c) {
        if (!cmp(v, c)) continue;
        full[vpos] = c;
        if (!emit(std::span<const kb::Value>(full.data(), arity))) return false;
      }
      return true;
    };
    const kb::PredId id = kb_.add_predicate(std::move(sig), test, enumerate);
    std::vector<kb::Mode> modes(arity, kb::Mode::In);
    modes[vpos] = kb::Mode::Const;
    kb_.add_mode(id, std::move(modes));
  }

  kb::BackgroundKB kb_;
  std::array<std::vector<kb::SortId>, 3> coord_;
};

int abs_df(Square a, Square b) { return std::abs(a.file - b.file); }
int abs_dr(Square a, Square b) { return std::abs(a.rank - b.rank); }

}  // namespace

kb::BackgroundKB background_high_kb() {
  using S = const std::array<Square, 3>&;
  HighBuilder b;
  b.numeric("dist_wk_bk", {WK, BK}, 7, [](S s) { return chebyshev(s[WK], s[BK]); });
  b.numeric("dist_wk_wr", {WK, WR}, 7, [](S s) { return chebyshev(s[WK], s[WR]); });
  b.numeric("dist_wr_bk", {WR, BK}, 7, [](S s) { return chebyshev(s[WR], s[BK]); });
  b.numeric("fdist_wk_bk", {WK, BK}, 7, [](S s) { return abs_df(s[WK], s[BK]); });
  b.numeric("rdist_wk_bk", {WK, BK}, 7, [](S s) { return abs_dr(s[WK], s[BK]); });
  b.numeric("fdist_wk_wr", {WK, WR}, 7, [](S s) { return abs_df(s[WK], s[WR]); });
  b.numeric("rdist_wk_wr", {WK, WR}, 7, [](S s) { return abs_dr(s[WK], s[WR]); });
  b.numeric("fdist_wr_bk", {WR, BK}, 7, [](S s) { return abs_df(s[WR], s[BK]); });
  b.numeric("rdist_wr_bk", {WR, BK}, 7, [](S s) { return abs_dr(s[WR], s[BK]); });
  b.numeric("align_wr_bk", {WR, BK}, 7, [](S s) { return alignment_distance(s[WR], s[BK]); });
  b.numeric("bk_edge_dist", {BK}, 3, [](S s) { return edge_distance(s[BK]); });
  b.numeric("bk_corner_dist", {BK}, 6, [](S s) { return corner_distance(s[BK]); });
  b.numeric("wk_centre_dist", {WK}, 3, [](S s) { return centre_distance(s[WK]); });

  b.boolean("adj_wk_wr", {WK, WR}, [](S s) { return chebyshev(s[WK], s[WR]) == 1; });
  b.boolean("adj_wk_bk", {WK, BK}, [](S s) { return chebyshev(s[WK], s[BK]) == 1; });
  b.boolean("adj_wr_bk", {WR, BK}, [](S s) { return chebyshev(s[WR], s[BK]) == 1; });
  b.boolean("wr_between", {WK, WR, BK}, [](S s) { return strictly_between(s[WK], s[WR], s[BK]); });
  b.boolean("wk_between", {WK, WR, BK}, [](S s) { return strictly_between(s[WR], s[WK], s[BK]); });
  b.boolean("bk_between", {WK, WR, BK}, [](S s) { return strictly_between(s[WK], s[BK], s[WR]); });
  b.boolean("kings_opposition", {WK, BK}, [](S s) { return kings_in_opposition(s[WK], s[BK]); });
  b.boolean("kings_almost_opposition", {WK, BK}, [](S s) { return kings_almost_in_opposition(s[WK], s[BK]); });
  b.boolean("l_pattern", {WK, WR, BK}, [](S s) { return l_pattern(KrkPosition{s[WK], s[WR], s[BK]}); });
  return b.take();
}

kb::BackgroundKB background_low_kb() {
  kb::BackgroundKB kb;
  const kb::SortId coord = kb.add_sort(kb::DomainSort::range("coord", 1, 8));
  kb.set_target("good", std::vector<kb::SortId>(6, coord));

  const kb::PredId lt = kb.add_predicate({"less_than", {coord, coord}, {kb::Mode::Out, kb::Mode::Out}},
                                         [](std::span<const kb::Value> a) { return a[0] < a[1]; });
  const kb::PredId adj =
      kb.add_predicate({"adjacent", {coord, coord}, {kb::Mode::Out, kb::Mode::Out}},
                       [](std::span<const kb::Value> a) { return a[0] - a[1] == 1 || a[1] - a[0] == 1; });
  kb.add_mode(lt, {kb::Mode::In, kb::Mode::In});
  kb.add_mode(adj, {kb::Mode::In, kb::Mode::In});
  return kb;
}

kb::BackgroundKB make_background(Background b) {
  return b == Background::Low ? background_low_kb() : background_high_kb();
}

std::vector<std::string> background_atoms(const KrkPosition& p, const kb::BackgroundKB& kb) {
  const Instance seed = p.to_instance();
  learn::LearnerConfig cfg;
  cfg.variable_depth = 1;
  const kb::Clause bottom = learn::saturate(seed, kb, cfg);
  std::vector<std::string> atoms;
  for (const kb::Literal& lit : bottom.body) {
    kb::Literal g = lit;
    for (kb::Term& t : g.args)
      if (t.is_var) t = kb::Term::constant(seed.at(t.var_id()));
    atoms.push_back(kb::to_text(g, kb));
  }
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  return atoms;
}

std::vector<std::string> background_high(const KrkPosition& p) {
  static const kb::BackgroundKB kb = background_high_kb();
  return background_atoms(p, kb);
}

std::vector<std::string> background_low(const KrkPosition& p) {
  static const kb::BackgroundKB kb = background_low_kb();
  return background_atoms(p, kb);
}

}  // namespace eois::chess

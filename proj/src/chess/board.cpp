#include <algorithm>
#include <cstdlib>

#include "eois/chess.hpp"

namespace eois::chess {

Square Square::parse(std::string_view name) {
  if (name.size() != 2 || name[0] < 'a' || name[0] > 'h' || name[1] < '1' || name[1] > '8')
    throw std::invalid_argument("bad square name: " + std::string(name));
  return {name[0] - 'a' + 1, name[1] - '0'};
}

std::string Square::name() const {
  return {static_cast<char>('a' + file - 1), static_cast<char>('0' + rank)};
}

int chebyshev(Square a, Square b) { return std::max(std::abs(a.file - b.file), std::abs(a.rank - b.rank)); }

KrkPosition KrkPosition::from_instance(std::span<const kb::Value> v) {
  if (v.size() != 6) throw std::invalid_argument("a KRK instance has 6 coordinates");
  auto c = [&](std::size_t i) { return static_cast<int>(v[i]); };
  return {{c(0), c(1)}, {c(2), c(3)}, {c(4), c(5)}};
}

Instance KrkPosition::to_instance() const { return {wk.file, wk.rank, wr.file, wr.rank, bk.file, bk.rank}; }

KrkPosition KrkPosition::from_index(std::uint32_t i) {
  return {Square::from_index(int(i / 4096)), Square::from_index(int(i / 64 % 64)), Square::from_index(int(i % 64))};
}

std::string KrkPosition::name() const { return "WK" + wk.name() + " WR" + wr.name() + " BK" + bk.name(); }

bool is_legal(const KrkPosition& p) {
  if (!p.wk.on_board() || !p.wr.on_board() || !p.bk.on_board()) return false;
  if (p.wk == p.wr || p.wk == p.bk || p.wr == p.bk) return false;
  return chebyshev(p.wk, p.bk) >= 2;
}

bool rook_attacks(const KrkPosition& p, Square target) {
  if (target == p.wr) return false;
  const bool same_file = target.file == p.wr.file;
  if (!same_file && target.rank != p.wr.rank) return false;
  // Blocked only if the white king stands strictly between.
  if (same_file && p.wk.file == p.wr.file) {
    const int lo = std::min(target.rank, p.wr.rank), hi = std::max(target.rank, p.wr.rank);
    if (p.wk.rank > lo && p.wk.rank < hi) return false;
  } else if (!same_file && p.wk.rank == p.wr.rank) {
    const int lo = std::min(target.file, p.wr.file), hi = std::max(target.file, p.wr.file);
    if (p.wk.file > lo && p.wk.file < hi) return false;
  }
  return true;
}

bool black_in_check(const KrkPosition& p) { return rook_attacks(p, p.bk); }

Square transform(Square sq, int s) {
  if (s & 4) std::swap(sq.file, sq.rank);
  if (s & 1) sq.file = 9 - sq.file;
  if (s & 2) sq.rank = 9 - sq.rank;
  return sq;
}

KrkPosition transform(const KrkPosition& p, int s) { return {transform(p.wk, s), transform(p.wr, s), transform(p.bk, s)}; }

KrkPosition canonical(const KrkPosition& p) {
  KrkPosition best = p;
  for (int s = 1; s < 8; ++s) best = std::min(best, transform(p, s));
  return best;
}

bool is_canonical(const KrkPosition& p) { return canonical(p) == p; }

std::vector<KrkPosition> enumerate_canonical() {
  std::vector<KrkPosition> out;
  for (std::uint32_t i = 0; i < kTableSize; ++i) {
    const KrkPosition p = KrkPosition::from_index(i);
    if (is_legal(p) && is_canonical(p)) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

constexpr int kKingSteps[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};
constexpr int kRookDirs[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};

}  // namespace

BlackReplies black_replies(const KrkPosition& p) {
  BlackReplies r;
  for (const auto& d : kKingSteps) {
    const Square t{p.bk.file + d[0], p.bk.rank + d[1]};
    if (!t.on_board() || chebyshev(t, p.wk) <= 1) continue;
    if (t == p.wr) {
      // Defended rooks are covered by the adjacency test above.
      r.can_capture_rook = true;
      continue;
    }
    if (rook_attacks(p, t)) continue;
    r.moves.push_back({p.wk, p.wr, t});
  }
  return r;
}

std::vector<KrkPosition> white_moves(const KrkPosition& p) {
  std::vector<KrkPosition> out;
  for (const auto& d : kKingSteps) {
    const Square t{p.wk.file + d[0], p.wk.rank + d[1]};
    if (!t.on_board() || t == p.wr || chebyshev(t, p.bk) <= 1) continue;
    out.push_back({t, p.wr, p.bk});
  }
  for (const auto& d : kRookDirs) {
    for (Square t{p.wr.file + d[0], p.wr.rank + d[1]}; t.on_board() && t != p.wk && t != p.bk;
         t = {t.file + d[0], t.rank + d[1]})
      out.push_back({p.wk, t, p.bk});
  }
  return out;
}

}  // namespace eois::chess

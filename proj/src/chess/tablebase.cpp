#include <cstring>
#include <fstream>

#include "eois/chess.hpp"

namespace eois::chess {

namespace {

constexpr std::int8_t kIllegal = -2;
constexpr std::int8_t kUnknown = -1;
constexpr char kMagic[8] = {'E', 'O', 'I', 'S', 'K', 'R', 'K', '\0'};

/// Compressed adjacency: successors of node i are targets[begin[i]..begin[i+1]).
struct Edges {
  std::vector<std::uint32_t> begin;
  std::vector<std::uint32_t> targets;
};

bool white_to_move_valid(const KrkPosition& p) { return is_legal(p) && !black_in_check(p); }

}  // namespace

Tablebase Tablebase::build() {
  Tablebase tb;
  tb.btm_.assign(kTableSize, kIllegal);
  tb.wtm_.assign(kTableSize, kIllegal);

  Edges black, white;
  black.begin.assign(kTableSize + 1, 0);
  white.begin.assign(kTableSize + 1, 0);
  for (std::uint32_t i = 0; i < kTableSize; ++i) {
    const KrkPosition p = KrkPosition::from_index(i);
    black.begin[i] = static_cast<std::uint32_t>(black.targets.size());
    white.begin[i] = static_cast<std::uint32_t>(white.targets.size());
    if (!is_legal(p)) continue;

    const BlackReplies r = black_replies(p);
    if (r.can_capture_rook) {
      tb.btm_[i] = kDraw;
    } else if (r.moves.empty()) {
      tb.btm_[i] = black_in_check(p) ? 0 : kDraw;
    } else {
      tb.btm_[i] = kUnknown;
      for (const KrkPosition& q : r.moves) black.targets.push_back(q.index());
    }
    if (white_to_move_valid(p)) {
      tb.wtm_[i] = kUnknown;
      for (const KrkPosition& q : white_moves(p)) white.targets.push_back(q.index());
    }
  }
  black.begin[kTableSize] = static_cast<std::uint32_t>(black.targets.size());
  white.begin[kTableSize] = static_cast<std::uint32_t>(white.targets.size());

  // Round d settles White-to-move positions that reach a depth d-1 mate and
  // then Black-to-move positions all of whose replies are settled.
  for (int d = 1;; ++d) {
    for (std::uint32_t i = 0; i < kTableSize; ++i) {
      if (tb.wtm_[i] != kUnknown) continue;
      for (std::uint32_t e = white.begin[i]; e < white.begin[i + 1]; ++e)
        if (tb.btm_[white.targets[e]] == d - 1) {
          tb.wtm_[i] = static_cast<std::int8_t>(d - 1);
          break;
        }
    }
    std::size_t settled = 0;
    for (std::uint32_t i = 0; i < kTableSize; ++i) {
      if (tb.btm_[i] != kUnknown) continue;
      bool all = true;
      for (std::uint32_t e = black.begin[i]; e < black.begin[i + 1] && all; ++e) all = tb.wtm_[black.targets[e]] >= 0;
      if (all) {
        tb.btm_[i] = static_cast<std::int8_t>(d);
        ++settled;
      }
    }
    if (settled == 0) break;
    if (d >= kDraw) throw std::logic_error("retrograde analysis exceeded the expected depth");
  }
  for (auto& v : tb.btm_)
    if (v == kUnknown) v = kDraw;
  for (auto& v : tb.wtm_)
    if (v == kUnknown) v = kDraw;
  return tb;
}

DepthOfWin Tablebase::depth_of_win(const KrkPosition& p) const {
  if (!is_legal(p)) throw IllegalPositionError("illegal KRK position: " + p.name());
  return {btm_[p.index()]};
}

DepthOfWin Tablebase::white_to_move(const KrkPosition& p) const {
  if (!white_to_move_valid(p)) throw IllegalPositionError("not a valid White-to-move position: " + p.name());
  return {wtm_[p.index()]};
}

void Tablebase::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::uint32_t version = kFormatVersion, size = kTableSize;
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&size), sizeof size);
  out.write(reinterpret_cast<const char*>(btm_.data()), static_cast<std::streamsize>(btm_.size()));
  out.write(reinterpret_cast<const char*>(wtm_.data()), static_cast<std::streamsize>(wtm_.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::optional<Tablebase> Tablebase::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::uint32_t version = 0, size = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&size), sizeof size);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0 || version != kFormatVersion || size != kTableSize)
    return std::nullopt;
  Tablebase tb;
  tb.btm_.resize(kTableSize);
  tb.wtm_.resize(kTableSize);
  in.read(reinterpret_cast<char*>(tb.btm_.data()), kTableSize);
  in.read(reinterpret_cast<char*>(tb.wtm_.data()), kTableSize);
  if (!in) return std::nullopt;
  return tb;
}

Tablebase Tablebase::load_or_build(const std::filesystem::path& path) {
  if (auto tb = load(path)) return std::move(*tb);
  Tablebase tb = build();
  tb.save(path);
  return tb;
}

std::array<std::uint64_t, kDraw + 1> class_counts(const Tablebase& tb, const std::vector<KrkPosition>& positions) {
  std::array<std::uint64_t, kDraw + 1> counts{};
  for (const KrkPosition& p : positions) ++counts[static_cast<std::size_t>(tb.depth_of_win(p).value)];
  return counts;
}

void write_csv(const std::filesystem::path& path, const Tablebase& tb, const std::vector<KrkPosition>& positions) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "wk_file,wk_rank,wr_file,wr_rank,bk_file,bk_rank,cost\n";
  for (const KrkPosition& p : positions) {
    const DepthOfWin d = tb.depth_of_win(p);
    out << p.wk.file << ',' << p.wk.rank << ',' << p.wr.file << ',' << p.wr.rank << ',' << p.bk.file << ','
        << p.bk.rank << ',';
    if (d.is_draw())
      out << "draw";
    else
      out << d.value;
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace eois::chess

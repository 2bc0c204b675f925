#pragma once

// King and rook against king, Black to move.

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eois/kb.hpp"
#include "eois/problem.hpp"

namespace eois::chess {

struct Square {
  int file = 1;  // 1..8 (a..h)
  int rank = 1;  // 1..8

  bool on_board() const { return file >= 1 && file <= 8 && rank >= 1 && rank <= 8; }
  int index() const { return (file - 1) * 8 + (rank - 1); }
  static Square from_index(int i) { return {i / 8 + 1, i % 8 + 1}; }
  /// "a1" style.
  static Square parse(std::string_view name);
  std::string name() const;
  auto operator<=>(const Square&) const = default;
};

int chebyshev(Square a, Square b);

struct KrkPosition {
  Square wk, wr, bk;

  static KrkPosition from_instance(std::span<const kb::Value> v);
  Instance to_instance() const;
  /// Index into the full 64^3 table.
  std::uint32_t index() const { return static_cast<std::uint32_t>((wk.index() * 64 + wr.index()) * 64 + bk.index()); }
  static KrkPosition from_index(std::uint32_t i);
  std::string name() const;  // "WKc1 WRa8 BKa1"
  auto operator<=>(const KrkPosition&) const = default;
};

inline constexpr std::uint32_t kTableSize = 64 * 64 * 64;

class IllegalPositionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Distinct squares on the board and kings not adjacent.  With Black to
/// move, White cannot be in check, so nothing else is required.
bool is_legal(const KrkPosition& p);

/// Squares the rook attacks, looking through the black king (so squares
/// behind it along the line count) and stopped by the white king.
bool rook_attacks(const KrkPosition& p, Square target);
bool black_in_check(const KrkPosition& p);

/// Applies symmetry s (0..7) of the square to every piece.
Square transform(Square sq, int s);
KrkPosition transform(const KrkPosition& p, int s);
/// Lexicographically smallest coordinate tuple over the 8 symmetries.
KrkPosition canonical(const KrkPosition& p);
bool is_canonical(const KrkPosition& p);

/// All legal canonical positions, sorted by coordinate tuple.
std::vector<KrkPosition> enumerate_canonical();

// ---------------------------------------------------------------------------
// Moves
// ---------------------------------------------------------------------------

struct BlackReplies {
  std::vector<KrkPosition> moves;  // positions with White to move
  bool can_capture_rook = false;   // the rook is en prise and undefended
};

BlackReplies black_replies(const KrkPosition& p);
/// White moves from a White-to-move position, giving Black-to-move positions.
std::vector<KrkPosition> white_moves(const KrkPosition& p);

// ---------------------------------------------------------------------------
// Depth of win
// ---------------------------------------------------------------------------

inline constexpr int kDraw = 17;  // sorts above every finite depth
inline constexpr int kMaxDepth = 16;

struct DepthOfWin {
  int value = kDraw;
  bool is_draw() const { return value == kDraw; }
  auto operator<=>(const DepthOfWin&) const = default;
};

class Tablebase {
 public:
  /// Full retrograde analysis over all 64^3 placements.
  static Tablebase build();
  static std::optional<Tablebase> load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  /// Loads a cache with the current format tag, or builds and writes one.
  static Tablebase load_or_build(const std::filesystem::path& path);

  /// Black to move.  Throws IllegalPositionError for illegal positions.
  DepthOfWin depth_of_win(const KrkPosition& p) const;
  /// White to move: the depth of win White can force after its move, or
  /// draw.  Only defined where Black is not in check.
  DepthOfWin white_to_move(const KrkPosition& p) const;

  static constexpr std::uint32_t kFormatVersion = 1;

 private:
  std::vector<std::int8_t> btm_;
  std::vector<std::int8_t> wtm_;
};

/// Count per cost class 0..16 and draw (index 17) over the canonical space.
std::array<std::uint64_t, kDraw + 1> class_counts(const Tablebase& tb, const std::vector<KrkPosition>& positions);

void write_csv(const std::filesystem::path& path, const Tablebase& tb, const std::vector<KrkPosition>& positions);

// ---------------------------------------------------------------------------
// Background knowledge
// ---------------------------------------------------------------------------

enum class Background : std::uint8_t { High, Low };

std::string background_name(Background b);
std::optional<Background> parse_background(const std::string& name);

/// Relational features of the three pieces: distances, alignment, edge and
/// corner proximity, between-ness, opposition patterns.  Target good/6.
kb::BackgroundKB background_high_kb();
/// Board geometry only: less_than and adjacent over coordinates.
kb::BackgroundKB background_low_kb();
kb::BackgroundKB make_background(Background b);

/// Ground atoms (constants only) the background asserts about a position,
/// in text form, sorted.
std::vector<std::string> background_atoms(const KrkPosition& p, const kb::BackgroundKB& kb);
std::vector<std::string> background_high(const KrkPosition& p);
std::vector<std::string> background_low(const KrkPosition& p);

// Geometric helpers the background is built from; exposed for tests.
bool strictly_between(Square a, Square mid, Square b);  // on a shared rank, file or diagonal
bool kings_in_opposition(Square wk, Square bk);
bool kings_almost_in_opposition(Square wk, Square bk);
bool l_pattern(const KrkPosition& p);
int edge_distance(Square s);
int corner_distance(Square s);
int centre_distance(Square s);
int alignment_distance(Square a, Square b);

// ---------------------------------------------------------------------------
// Problem
// ---------------------------------------------------------------------------

class ChessSpace : public InstanceSpace {
 public:
  explicit ChessSpace(const std::vector<KrkPosition>& positions);
  bool enumerable() const override { return true; }
  const std::vector<Instance>& all() const override { return all_; }
  Instance random(Rng& rng) const override;
  std::optional<Instance> canonical(std::span<const kb::Value> grounding) const override;

 private:
  std::vector<Instance> all_;
};

class ChessProblem : public Problem, private ObjectiveFn {
 public:
  ChessProblem(std::shared_ptr<const Tablebase> tb, Background b);

  std::string name() const override;
  const kb::BackgroundKB& background() const override { return kb_; }
  const InstanceSpace& space() const override { return space_; }
  const ObjectiveFn& objective() const override { return *this; }
  ReferenceCount reference(Cost theta) const override;

  const Tablebase& tablebase() const { return *tb_; }
  const std::vector<KrkPosition>& positions() const { return positions_; }
  const std::array<std::uint64_t, kDraw + 1>& counts() const { return counts_; }

 private:
  Cost cost(const Instance& x) const override;

  std::shared_ptr<const Tablebase> tb_;
  Background which_;
  kb::BackgroundKB kb_;
  std::vector<KrkPosition> positions_;
  ChessSpace space_;
  std::array<std::uint64_t, kDraw + 1> counts_{};
};

}  // namespace eois::chess

#include "eois/chess.hpp"

namespace eois::chess {

ChessSpace::ChessSpace(const std::vector<KrkPosition>& positions) {
  all_.reserve(positions.size());
  for (const KrkPosition& p : positions) all_.push_back(p.to_instance());
}

Instance ChessSpace::random(Rng& rng) const { return all_[uniform_below(rng, all_.size())]; }

std::optional<Instance> ChessSpace::canonical(std::span<const kb::Value> grounding) const {
  if (grounding.size() != 6) return std::nullopt;
  for (kb::Value v : grounding)
    if (v < 1 || v > 8) return std::nullopt;
  const KrkPosition p = KrkPosition::from_instance(grounding);
  if (!is_legal(p)) return std::nullopt;
  return chess::canonical(p).to_instance();
}

ChessProblem::ChessProblem(std::shared_ptr<const Tablebase> tb, Background b)
    : tb_(std::move(tb)), which_(b), kb_(make_background(b)), positions_(enumerate_canonical()), space_(positions_) {
  counts_ = class_counts(*tb_, positions_);
}

std::string ChessProblem::name() const { return "chess-" + background_name(which_); }

Cost ChessProblem::cost(const Instance& x) const { return tb_->depth_of_win(KrkPosition::from_instance(x)).value; }

ReferenceCount ChessProblem::reference(Cost theta) const {
  ReferenceCount r;
  r.size = positions_.size();
  for (int c = 0; c <= kDraw; ++c)
    if (c <= theta) r.count += counts_[static_cast<std::size_t>(c)];
  return r;
}

}  // namespace eois::chess

#pragma once

// What the optimisation loop needs from a domain: an instance space it can
// draw from, an objective, background knowledge for the learner, and the
// reference distribution that baselines are measured against.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eois/kb.hpp"
#include "eois/rng.hpp"

namespace eois {

using Instance = std::vector<kb::Value>;
using Cost = std::int64_t;

struct InstanceHash {
  std::size_t operator()(const Instance& x) const noexcept {
    std::uint64_t h = 0x84222325cbf29ce4ull;
    for (kb::Value v : x) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

class InstanceSpace {
 public:
  virtual ~InstanceSpace() = default;

  /// True when all() lists the whole space.
  virtual bool enumerable() const = 0;
  /// Every canonical instance once, in a fixed order.  Only for enumerable
  /// spaces; others throw.
  virtual const std::vector<Instance>& all() const;
  /// One instance drawn uniformly from the space.
  virtual Instance random(Rng& rng) const = 0;
  /// The canonical instance denoted by a grounding of the target head, or
  /// nothing if the grounding is not a member of the space.
  virtual std::optional<Instance> canonical(std::span<const kb::Value> grounding) const = 0;
};

class ObjectiveFn {
 public:
  virtual ~ObjectiveFn() = default;
  virtual Cost cost(const Instance& x) const = 0;
};

/// How many instances of the reference distribution have cost <= theta.
struct ReferenceCount {
  std::uint64_t count = 0;
  std::uint64_t size = 0;       // size of the space or of the reference pool
  bool from_pool = false;       // true when `size` is a sample, not the space
  double probability() const { return size == 0 ? 0.0 : double(count) / double(size); }
};

class Problem {
 public:
  virtual ~Problem() = default;
  virtual std::string name() const = 0;
  virtual const kb::BackgroundKB& background() const = 0;
  virtual const InstanceSpace& space() const = 0;
  virtual const ObjectiveFn& objective() const = 0;
  virtual ReferenceCount reference(Cost theta) const = 0;
};

}  // namespace eois

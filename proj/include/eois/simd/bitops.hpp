#pragma once

// Word-level bitset kernels used by the learner's coverage engine.
//
// Every kernel has a portable scalar reference implementation and, where the
// target supports it, an AVX2 (x86-64) or NEON (aarch64) variant.  The active
// variant is chosen once at first use from the running CPU's capabilities and
// can be overridden for testing.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace eois::simd {

using Word = std::uint64_t;

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

/// Variants compiled into this binary and runnable on this CPU.
bool isa_available(Isa isa);

/// The variant dispatched to by the free functions below.
Isa active_isa();

/// Force a variant; returns false (and changes nothing) if unavailable.
bool set_active_isa(Isa isa);

struct Kernels {
  std::size_t (*popcount)(const Word* a, std::size_t n);
  std::size_t (*and_popcount)(const Word* a, const Word* b, std::size_t n);
  std::size_t (*and_into)(Word* dst, const Word* a, const Word* b, std::size_t n);
  bool (*any)(const Word* a, std::size_t n);
};

/// Kernel table for a specific variant. Precondition: isa_available(isa).
const Kernels& kernels(Isa isa);

// Dispatching wrappers.  Spans passed together must have equal length.
std::size_t popcount(std::span<const Word> a);
std::size_t and_popcount(std::span<const Word> a, std::span<const Word> b);
/// dst = a & b; returns popcount(dst). dst may alias a or b.
std::size_t and_into(std::span<Word> dst, std::span<const Word> a, std::span<const Word> b);
bool any(std::span<const Word> a);

}  // namespace eois::simd

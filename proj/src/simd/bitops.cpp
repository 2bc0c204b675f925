#include "eois/simd/bitops.hpp"

#include <atomic>
#include <bit>
#include <cassert>

#if defined(__x86_64__) || defined(_M_X64)
#define EOIS_SIMD_X86 1
#include <immintrin.h>
#else
#define EOIS_SIMD_X86 0
#endif

#if defined(__aarch64__) && defined(__ARM_NEON)
#define EOIS_SIMD_NEON 1
#include <arm_neon.h>
#else
#define EOIS_SIMD_NEON 0
#endif

namespace eois::simd {
namespace {

// ---------------------------------------------------------------------------
// Scalar reference
// ---------------------------------------------------------------------------

std::size_t popcount_scalar(const Word* a, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += static_cast<std::size_t>(std::popcount(a[i]));
  return c;
}

std::size_t and_popcount_scalar(const Word* a, const Word* b, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  return c;
}

std::size_t and_into_scalar(Word* dst, const Word* a, const Word* b, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    dst[i] = a[i] & b[i];
    c += static_cast<std::size_t>(std::popcount(dst[i]));
  }
  return c;
}

bool any_scalar(const Word* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] != 0) return true;
  return false;
}

constexpr Kernels kScalar{popcount_scalar, and_popcount_scalar, and_into_scalar, any_scalar};

// ---------------------------------------------------------------------------
// AVX2: nibble-LUT popcount (Mula), horizontal sum with SAD.
// ---------------------------------------------------------------------------
#if EOIS_SIMD_X86

__attribute__((target("avx2"))) inline __m256i popcnt256(__m256i v) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                       0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  __m256i lo = _mm256_and_si256(v, low_mask);
  __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
  return _mm256_sad_epu8(cnt, _mm256_setzero_si256());
}

__attribute__((target("avx2"))) inline std::size_t hsum64(__m256i acc) {
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  return static_cast<std::size_t>(lanes[0] + lanes[1] + lanes[2] + lanes[3]);
}

__attribute__((target("avx2"))) std::size_t popcount_avx2(const Word* a, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    acc = _mm256_add_epi64(acc, popcnt256(v));
  }
  return hsum64(acc) + popcount_scalar(a + i, n - i);
}

__attribute__((target("avx2"))) std::size_t and_popcount_avx2(const Word* a, const Word* b,
                                                              std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    acc = _mm256_add_epi64(acc, popcnt256(_mm256_and_si256(va, vb)));
  }
  return hsum64(acc) + and_popcount_scalar(a + i, b + i, n - i);
}

__attribute__((target("avx2"))) std::size_t and_into_avx2(Word* dst, const Word* a,
                                                          const Word* b, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    __m256i v = _mm256_and_si256(va, vb);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), v);
    acc = _mm256_add_epi64(acc, popcnt256(v));
  }
  return hsum64(acc) + and_into_scalar(dst + i, a + i, b + i, n - i);
}

__attribute__((target("avx2"))) bool any_avx2(const Word* a, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    if (!_mm256_testz_si256(v, v)) return true;
  }
  return any_scalar(a + i, n - i);
}

constexpr Kernels kAvx2{popcount_avx2, and_popcount_avx2, and_into_avx2, any_avx2};

#endif

// ---------------------------------------------------------------------------
// NEON: vcnt on bytes, pairwise widening adds.
// ---------------------------------------------------------------------------
#if EOIS_SIMD_NEON

inline uint64x2_t popcnt128(uint64x2_t v) {
  uint8x16_t c = vcntq_u8(vreinterpretq_u8_u64(v));
  return vpaddlq_u32(vpaddlq_u16(vpaddlq_u8(c)));
}

std::size_t popcount_neon(const Word* a, std::size_t n) {
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_u64(acc, popcnt128(vld1q_u64(a + i)));
  return static_cast<std::size_t>(vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1)) +
         popcount_scalar(a + i, n - i);
}

std::size_t and_popcount_neon(const Word* a, const Word* b, std::size_t n) {
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vaddq_u64(acc, popcnt128(vandq_u64(vld1q_u64(a + i), vld1q_u64(b + i))));
  return static_cast<std::size_t>(vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1)) +
         and_popcount_scalar(a + i, b + i, n - i);
}

std::size_t and_into_neon(Word* dst, const Word* a, const Word* b, std::size_t n) {
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    uint64x2_t v = vandq_u64(vld1q_u64(a + i), vld1q_u64(b + i));
    vst1q_u64(dst + i, v);
    acc = vaddq_u64(acc, popcnt128(v));
  }
  return static_cast<std::size_t>(vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1)) +
         and_into_scalar(dst + i, a + i, b + i, n - i);
}

bool any_neon(const Word* a, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    uint64x2_t v = vld1q_u64(a + i);
    if ((vgetq_lane_u64(v, 0) | vgetq_lane_u64(v, 1)) != 0) return true;
  }
  return any_scalar(a + i, n - i);
}

constexpr Kernels kNeon{popcount_neon, and_popcount_neon, and_into_neon, any_neon};

#endif

Isa detect() {
#if EOIS_SIMD_X86
  if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
#if EOIS_SIMD_NEON
  return Isa::Neon;
#endif
  return Isa::Scalar;
}

std::atomic<const Kernels*>& active_table() {
  static std::atomic<const Kernels*> table{&kernels(detect())};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if EOIS_SIMD_X86
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon: return EOIS_SIMD_NEON != 0;
  }
  return false;
}

const Kernels& kernels(Isa isa) {
  switch (isa) {
#if EOIS_SIMD_X86
    case Isa::Avx2: return kAvx2;
#endif
#if EOIS_SIMD_NEON
    case Isa::Neon: return kNeon;
#endif
    default: return kScalar;
  }
}

Isa active_isa() {
  const Kernels* k = active_table().load(std::memory_order_relaxed);
#if EOIS_SIMD_X86
  if (k == &kAvx2) return Isa::Avx2;
#endif
#if EOIS_SIMD_NEON
  if (k == &kNeon) return Isa::Neon;
#endif
  (void)k;
  return Isa::Scalar;
}

bool set_active_isa(Isa isa) {
  if (!isa_available(isa)) return false;
  active_table().store(&kernels(isa), std::memory_order_relaxed);
  return true;
}

std::size_t popcount(std::span<const Word> a) {
  return active_table().load(std::memory_order_relaxed)->popcount(a.data(), a.size());
}

std::size_t and_popcount(std::span<const Word> a, std::span<const Word> b) {
  assert(a.size() == b.size());
  return active_table().load(std::memory_order_relaxed)->and_popcount(a.data(), b.data(), a.size());
}

std::size_t and_into(std::span<Word> dst, std::span<const Word> a, std::span<const Word> b) {
  assert(a.size() == b.size() && dst.size() == a.size());
  return active_table().load(std::memory_order_relaxed)
      ->and_into(dst.data(), a.data(), b.data(), a.size());
}

bool any(std::span<const Word> a) {
  return active_table().load(std::memory_order_relaxed)->any(a.data(), a.size());
}

}  // namespace eois::simd

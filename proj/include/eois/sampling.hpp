#pragma once

// Drawing the next population: uniform selection when there is no model,
// otherwise instances entailed by the theory, either by walking the success
// sets of its clauses or by filtering uniform draws.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eois/kb.hpp"
#include "eois/problem.hpp"

namespace eois::sampling {

enum class Mode : std::uint8_t { EnumerateSuccessSet, Rejection };

std::string mode_name(Mode m);
std::optional<Mode> parse_mode(const std::string& name);

struct SamplerConfig {
  std::size_t n = 1000;
  double delta = 1.0;
  /// 0 means 200 * n.
  std::uint64_t max_rejection_attempts = 0;
  std::uint64_t rng_seed = 0;
  Mode mode = Mode::EnumerateSuccessSet;
  std::size_t threads = 1;

  std::uint64_t attempt_limit() const { return max_rejection_attempts ? max_rejection_attempts : 200 * n; }
  std::vector<std::string> validate() const;
};

struct SampleResult {
  std::vector<Instance> instances;
  bool uniform = false;     // no model: drawn uniformly from the space
  bool exhausted = false;   // rejection attempt limit reached before n
  std::uint64_t attempts = 0;
};

SampleResult sample(const SamplerConfig& cfg, const kb::Theory& theory, const kb::BackgroundKB& kb,
                    const InstanceSpace& space);

/// n distinct instances drawn uniformly without replacement (all of them if
/// the space is smaller).
std::vector<Instance> uniform_sample(std::size_t n, const InstanceSpace& space, Rng& rng);

class EmptySampleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Fraction of costs at or below theta.
double estimate_success_probability(std::span<const Cost> costs, Cost theta);
double estimate_success_probability(std::span<const Instance> sample, Cost theta, const ObjectiveFn& f);

}  // namespace eois::sampling

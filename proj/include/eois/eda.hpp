#pragma once

// The model-assisted optimisation loop: label everything evaluated so far
// against a falling cost threshold, learn a theory of the good instances,
// sample the next population through it, evaluate, repeat.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eois/learner.hpp"
#include "eois/problem.hpp"
#include "eois/sampling.hpp"

namespace eois::eda {

struct ThresholdSchedule {
  std::vector<Cost> thetas;  // strictly decreasing
  Cost theta_star = 0;

  std::vector<std::string> validate() const;
};

struct EoisConfig {
  ThresholdSchedule schedule;
  learn::LearnerConfig learner;
  sampling::SamplerConfig sampler;  // rng_seed is overwritten per phase from `seed`
  bool reuse_history = true;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  std::vector<std::string> validate() const;
};

struct Evaluated {
  Instance x;
  Cost cost = 0;
  bool operator==(const Evaluated&) const = default;
};

struct ClauseRecord {
  std::string text;
  std::size_t pos = 0;
  std::size_t neg = 0;
  double precision = 0.0;
  long compression = 0;
  std::size_t body_length = 0;
  std::size_t nodes = 0;
  bool operator==(const ClauseRecord&) const = default;
};

struct IterationRecord {
  std::size_t k = 0;
  Cost theta = 0;
  std::uint64_t sampler_seed = 0;

  std::size_t training_size = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;

  std::vector<ClauseRecord> theory;
  std::size_t ungeneralised = 0;
  std::size_t searches = 0;
  std::size_t search_nodes_total = 0;
  std::size_t search_nodes_max = 0;

  bool uniform_fallback = false;
  bool sampler_exhausted = false;
  std::uint64_t sampler_attempts = 0;
  std::vector<Evaluated> population;

  std::size_t successes = 0;  // members of the population with cost <= theta
  double model_probability = 0.0;
  std::uint64_t baseline_count = 0;
  std::uint64_t baseline_size = 0;
  double baseline_probability = 0.0;

  std::size_t near_optimal_found = 0;  // distinct, cumulative over iterations 1..k
  std::uint64_t near_optimal_total = 0;
  bool near_optimal_total_from_pool = false;

  std::size_t evaluations = 0;  // distinct instances evaluated so far, P_0 included

  bool operator==(const IterationRecord&) const = default;
};

struct RunRecord {
  std::string problem;
  EoisConfig config;
  std::uint64_t initial_seed = 0;
  std::vector<Evaluated> initial_population;
  std::size_t initial_near_optimal = 0;  // members of P_0 with cost <= theta*
  std::vector<IterationRecord> iterations;
  std::size_t evaluations = 0;
  std::size_t best_iteration = 0;  // 0 is P_0

  /// The declared return value: the last population drawn.
  const std::vector<Evaluated>& final_population() const {
    return iterations.empty() ? initial_population : iterations.back().population;
  }
};

/// Splits a pool at theta.  Order of the pool is preserved within each side.
learn::LabelledData label(const std::vector<Evaluated>& pool, Cost theta);

using Learner = std::function<learn::InduceResult(const learn::LabelledData&, const kb::BackgroundKB&,
                                                  const learn::LearnerConfig&)>;

/// Wall-clock seconds per phase.  Kept apart from RunRecord, which must be
/// reproducible byte for byte.
struct PhaseTimings {
  std::size_t k = 0;
  double learn = 0.0;
  double sample = 0.0;
  double evaluate = 0.0;
};

/// Runs the loop.  `learner` defaults to learn::induce; a stub returning an
/// empty theory turns the procedure into repeated uniform sampling.
RunRecord run_eois(const EoisConfig& cfg, const Problem& problem, const Learner& learner = {},
                   std::vector<PhaseTimings>* timings = nullptr);

struct Gain {
  double value = 0.0;
  bool infinite = false;  // baseline probability is zero
  std::size_t successes = 0;
  std::size_t sample_size = 0;
  std::uint64_t baseline_count = 0;
  std::uint64_t baseline_size = 0;
};

/// k counts from 1.
Gain gain_ratio(const RunRecord& record, std::size_t k);

struct NearOptimal {
  std::size_t found = 0;
  std::uint64_t total = 0;
  bool total_from_pool = false;
};

/// Distinct instances with cost <= theta_star over populations 1..k; k = 0
/// means the initial population alone.  The denominator comes from the
/// problem's reference distribution.
NearOptimal near_optimal_count(const RunRecord& record, std::size_t k, Cost theta_star,
                               const Problem& problem);

/// Expected near-optimal count for `evaluated` uniform draws.
double uniform_near_optimal_expectation(const ReferenceCount& ref, std::size_t evaluated);

}  // namespace eois::eda

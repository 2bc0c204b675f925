#pragma once

// Five jobs, five machines; task j of every job runs on machine j, in
// machine order.  A schedule fixes the order of jobs on each machine and
// every task starts as soon as both its machine and its job allow.

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eois/kb.hpp"
#include "eois/problem.hpp"

namespace eois::jobshop {

inline constexpr int kJobs = 5;
inline constexpr int kMachines = 5;
inline constexpr std::uint64_t kOrdersPerMachine = 120;  // 5!
inline constexpr std::uint64_t kScheduleCount = 120ull * 120 * 120 * 120 * 120;

template <class T>
using Grid = std::array<std::array<T, kMachines>, kJobs>;

/// dur[job][machine], both 0-based.
struct DurationMatrix {
  Grid<int> dur{};

  bool valid() const;
  bool operator==(const DurationMatrix&) const = default;
};

/// order[machine][position] = job, all 0-based.
struct Schedule {
  std::array<std::array<int, kJobs>, kMachines> order{};

  bool valid() const;
  static Schedule identity();
  /// Index in [0, 120^5): machine m's permutation rank is digit m in base 120.
  std::uint64_t encode() const;
  static Schedule decode(std::uint64_t index);
  /// Position (0-based) of `job` on `machine`.
  int position(int job, int machine) const;
  bool operator==(const Schedule&) const = default;
};

/// Lexicographic rank of a permutation of 0..4, and its inverse.
int permutation_rank(const std::array<int, kJobs>& perm);
std::array<int, kJobs> permutation_unrank(int rank);

struct Timeline {
  Grid<int> start{};
  Grid<int> end{};
  int makespan = 0;
  std::array<int, kMachines> first_start{};  // start of the machine's first task
  std::array<int, kMachines> idle{};         // gaps between its first start and last end
  int total_idle = 0;
};

Timeline simulate(const Schedule& s, const DurationMatrix& d);
int makespan(const Schedule& s, const DurationMatrix& d);

Schedule random_schedule(Rng& rng);
DurationMatrix random_matrix(Rng& rng, int lo = 1, int hi = 99);

// ---------------------------------------------------------------------------
// Reference pool and thresholds
// ---------------------------------------------------------------------------

struct ReferencePool {
  std::uint64_t seed = 0;
  std::vector<Schedule> schedules;
  std::vector<int> makespans;
  std::vector<int> sorted_makespans;

  std::uint64_t count_at_most(int theta) const;
};

/// `size` uniform schedules drawn from `seed`; evaluation may use threads,
/// the draw order does not depend on them.
ReferencePool build_reference_pool(const DurationMatrix& d, std::size_t size, std::uint64_t seed,
                                   std::size_t threads = 1);

/// Constants available to the time-bound predicates.  Per-machine lists
/// are empty for a machine whose value never varies (machine 1 never waits).
struct ThresholdGrid {
  std::array<std::vector<int>, kMachines> wait;         // idle time on one machine
  std::vector<int> total_wait;                          // idle time summed over machines
  std::array<std::vector<int>, kMachines> first_start;  // start of a machine's first task

  bool operator==(const ThresholdGrid&) const = default;
};

/// Deciles (10%..90%, distinct values) over the pool.  A machine's idle and
/// first-start lists hold its own deciles merged with the deciles of that
/// quantity pooled over all machines; total idle time has its own deciles.
ThresholdGrid decile_grid(const ReferencePool& pool, const DurationMatrix& d);

// ---------------------------------------------------------------------------
// Background knowledge
// ---------------------------------------------------------------------------

/// Machine-level duration facts: argmin/argmax (lower job id on ties) and
/// rank (0 = fastest, ties by job id).
struct DurationFacts {
  std::array<int, kMachines> fastest{};
  std::array<int, kMachines> slowest{};
  Grid<int> rank{};
};
DurationFacts duration_facts(const DurationMatrix& d);

/// Predicates over good(S): early/late placement, fastest/slowest and
/// fast/slow tasks, and bounds on idle and start times.  Jobs and machines
/// appear as 1-based constants.
kb::BackgroundKB background_kb(const DurationMatrix& d, const ThresholdGrid& grid);

/// Ground atoms the background asserts about a schedule, sorted, in text form.
std::vector<std::string> background_jobshop(const Schedule& s, const kb::BackgroundKB& kb);

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

void write_matrix_csv(const std::filesystem::path& path, const DurationMatrix& d);
DurationMatrix read_matrix_csv(const std::filesystem::path& path);
/// Columns m1p1..m5p5 (1-based job ids), then makespan.
void write_pool_csv(const std::filesystem::path& path, const ReferencePool& pool);

// ---------------------------------------------------------------------------
// Matrix selection
// ---------------------------------------------------------------------------

/// A target makespan distribution for uniform schedules, as cumulative
/// fractions at fixed thresholds.  The defaults are the published job-shop
/// histogram at 600, 700, ..., 1200.
struct ShapeTarget {
  std::vector<int> thresholds{600, 700, 800, 900, 1000, 1100, 1200};
  std::vector<double> cumulative{0.003, 0.025, 0.102, 0.266, 0.508, 0.748, 0.907};
  std::size_t probe_size = 20000;
};

/// Sum over thresholds of squared log ratios between the probe's cumulative
/// fractions (with half a count added) and the target's.  The probe is
/// drawn from derive_seed(matrix_seed, 1).
double shape_distance(const DurationMatrix& d, std::uint64_t matrix_seed, const ShapeTarget& t = {});

/// The seed in [first, last] whose random_matrix is closest to the target;
/// the lowest seed wins ties.
std::uint64_t closest_matrix_seed(std::uint64_t first, std::uint64_t last, const ShapeTarget& t = {}, int lo = 1,
                                  int hi = 99);

// ---------------------------------------------------------------------------
// Problem
// ---------------------------------------------------------------------------

class JobshopSpace : public InstanceSpace {
 public:
  bool enumerable() const override { return false; }
  Instance random(Rng& rng) const override;
  std::optional<Instance> canonical(std::span<const kb::Value> grounding) const override;
};

class JobshopProblem : public Problem, private ObjectiveFn {
 public:
  JobshopProblem(DurationMatrix d, std::size_t pool_size, std::uint64_t pool_seed, std::size_t threads = 1);

  std::string name() const override { return "jobshop"; }
  const kb::BackgroundKB& background() const override { return kb_; }
  const InstanceSpace& space() const override { return space_; }
  const ObjectiveFn& objective() const override { return *this; }
  ReferenceCount reference(Cost theta) const override;

  const DurationMatrix& matrix() const { return d_; }
  const ReferencePool& pool() const { return pool_; }
  const ThresholdGrid& grid() const { return grid_; }

 private:
  Cost cost(const Instance& x) const override;

  DurationMatrix d_;
  ReferencePool pool_;
  ThresholdGrid grid_;
  kb::BackgroundKB kb_;
  JobshopSpace space_;
};

}  // namespace eois::jobshop

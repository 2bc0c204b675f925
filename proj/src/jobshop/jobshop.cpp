#include "eois/jobshop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "eois/parallel.hpp"

namespace eois::jobshop {

bool DurationMatrix::valid() const {
  for (const auto& row : dur)
    for (int v : row)
      if (v < 1) return false;
  return true;
}

bool Schedule::valid() const {
  for (const auto& perm : order) {
    std::array<bool, kJobs> used{};
    for (int j : perm) {
      if (j < 0 || j >= kJobs || used[static_cast<std::size_t>(j)]) return false;
      used[static_cast<std::size_t>(j)] = true;
    }
  }
  return true;
}

Schedule Schedule::identity() {
  Schedule s;
  for (auto& perm : s.order) std::iota(perm.begin(), perm.end(), 0);
  return s;
}

int permutation_rank(const std::array<int, kJobs>& perm) {
  static constexpr int kFact[kJobs] = {24, 6, 2, 1, 1};
  int rank = 0;
  for (int i = 0; i < kJobs; ++i) {
    int smaller = 0;
    for (int k = i + 1; k < kJobs; ++k) smaller += perm[k] < perm[i];
    rank += smaller * kFact[i];
  }
  return rank;
}

std::array<int, kJobs> permutation_unrank(int rank) {
  if (rank < 0 || rank >= static_cast<int>(kOrdersPerMachine)) throw std::out_of_range("permutation rank");
  static constexpr int kFact[kJobs] = {24, 6, 2, 1, 1};
  std::array<int, kJobs> pool{0, 1, 2, 3, 4};
  std::array<int, kJobs> perm{};
  int left = kJobs;
  for (int i = 0; i < kJobs; ++i) {
    const int q = rank / kFact[i];
    rank %= kFact[i];
    perm[i] = pool[q];
    std::copy(pool.begin() + q + 1, pool.begin() + left, pool.begin() + q);
    --left;
  }
  return perm;
}

std::uint64_t Schedule::encode() const {
  std::uint64_t index = 0;
  for (int m = kMachines - 1; m >= 0; --m) index = index * kOrdersPerMachine + permutation_rank(order[m]);
  return index;
}

Schedule Schedule::decode(std::uint64_t index) {
  if (index >= kScheduleCount) throw std::out_of_range("schedule index");
  Schedule s;
  for (int m = 0; m < kMachines; ++m) {
    s.order[m] = permutation_unrank(static_cast<int>(index % kOrdersPerMachine));
    index /= kOrdersPerMachine;
  }
  return s;
}

int Schedule::position(int job, int machine) const {
  const auto& perm = order.at(static_cast<std::size_t>(machine));
  for (int p = 0; p < kJobs; ++p)
    if (perm[p] == job) return p;
  throw std::out_of_range("job not on machine");
}

Timeline simulate(const Schedule& s, const DurationMatrix& d) {
  Timeline t;
  for (int m = 0; m < kMachines; ++m) {
    int free_at = 0, busy = 0;
    for (int p = 0; p < kJobs; ++p) {
      const int j = s.order[m][p];
      const int ready = m == 0 ? 0 : t.end[j][m - 1];
      t.start[j][m] = std::max(free_at, ready);
      t.end[j][m] = t.start[j][m] + d.dur[j][m];
      free_at = t.end[j][m];
      busy += d.dur[j][m];
    }
    t.first_start[m] = t.start[s.order[m][0]][m];
    t.idle[m] = free_at - t.first_start[m] - busy;
    t.total_idle += t.idle[m];
    // Jobs leave the last machine last, so its final task sets the makespan.
    t.makespan = std::max(t.makespan, free_at);
  }
  return t;
}

int makespan(const Schedule& s, const DurationMatrix& d) { return simulate(s, d).makespan; }

Schedule random_schedule(Rng& rng) {
  Schedule s = Schedule::identity();
  for (auto& perm : s.order) shuffle(std::span<int>(perm), rng);
  return s;
}

DurationMatrix random_matrix(Rng& rng, int lo, int hi) {
  if (lo < 1 || hi < lo) throw std::invalid_argument("duration range must satisfy 1 <= lo <= hi");
  DurationMatrix d;
  for (auto& row : d.dur)
    for (int& v : row) v = static_cast<int>(uniform_int(rng, lo, hi));
  return d;
}

std::uint64_t ReferencePool::count_at_most(int theta) const {
  return static_cast<std::uint64_t>(std::upper_bound(sorted_makespans.begin(), sorted_makespans.end(), theta) -
                                    sorted_makespans.begin());
}

ReferencePool build_reference_pool(const DurationMatrix& d, std::size_t size, std::uint64_t seed,
                                   std::size_t threads) {
  ReferencePool pool;
  pool.seed = seed;
  Rng rng(seed);
  pool.schedules.reserve(size);
  for (std::size_t i = 0; i < size; ++i) pool.schedules.push_back(random_schedule(rng));
  pool.makespans.resize(size);
  parallel_for(size, threads, [&](std::size_t i) { pool.makespans[i] = makespan(pool.schedules[i], d); });
  pool.sorted_makespans = pool.makespans;
  std::sort(pool.sorted_makespans.begin(), pool.sorted_makespans.end());
  return pool;
}

namespace {

std::vector<int> deciles(std::vector<int> values) {
  std::vector<int> out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  if (values.front() == values.back()) return out;
  for (int q = 1; q <= 9; ++q) out.push_back(values[(values.size() - 1) * static_cast<std::size_t>(q) / 10]);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// A machine whose value never varies keeps an empty list.
std::vector<int> with_shared(std::vector<int> own, const std::vector<int>& shared) {
  if (own.empty()) return own;
  own.insert(own.end(), shared.begin(), shared.end());
  std::sort(own.begin(), own.end());
  own.erase(std::unique(own.begin(), own.end()), own.end());
  return own;
}

}  // namespace

ThresholdGrid decile_grid(const ReferencePool& pool, const DurationMatrix& d) {
  std::array<std::vector<int>, kMachines> wait, first;
  std::vector<int> total;
  for (int m = 0; m < kMachines; ++m) {
    wait[m].reserve(pool.schedules.size());
    first[m].reserve(pool.schedules.size());
  }
  total.reserve(pool.schedules.size());
  for (const Schedule& s : pool.schedules) {
    const Timeline t = simulate(s, d);
    for (int m = 0; m < kMachines; ++m) {
      wait[m].push_back(t.idle[m]);
      first[m].push_back(t.first_start[m]);
    }
    total.push_back(t.total_idle);
  }
  // Each machine gets its own deciles plus those of all machines pooled.
  // The pooled values reach into the low tail of the busier machines, where
  // the best schedules sit.
  std::vector<int> pooled_wait, pooled_first;
  for (int m = 0; m < kMachines; ++m) {
    pooled_wait.insert(pooled_wait.end(), wait[m].begin(), wait[m].end());
    pooled_first.insert(pooled_first.end(), first[m].begin(), first[m].end());
  }
  const std::vector<int> shared_wait = deciles(std::move(pooled_wait));
  const std::vector<int> shared_first = deciles(std::move(pooled_first));
  ThresholdGrid g;
  for (int m = 0; m < kMachines; ++m) {
    g.wait[m] = with_shared(deciles(std::move(wait[m])), shared_wait);
    g.first_start[m] = with_shared(deciles(std::move(first[m])), shared_first);
  }
  g.total_wait = deciles(std::move(total));
  return g;
}

DurationFacts duration_facts(const DurationMatrix& d) {
  DurationFacts f;
  for (int m = 0; m < kMachines; ++m) {
    std::array<int, kJobs> jobs{0, 1, 2, 3, 4};
    std::stable_sort(jobs.begin(), jobs.end(), [&](int a, int b) { return d.dur[a][m] < d.dur[b][m]; });
    for (int r = 0; r < kJobs; ++r) f.rank[jobs[r]][m] = r;
    f.fastest[m] = jobs.front();
    // Slowest breaks ties towards the lower job id as well.
    int slow = 0;
    for (int j = 1; j < kJobs; ++j)
      if (d.dur[j][m] > d.dur[slow][m]) slow = j;
    f.slowest[m] = slow;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

void write_matrix_csv(const std::filesystem::path& path, const DurationMatrix& d) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "job";
  for (int m = 1; m <= kMachines; ++m) out << ",m" << m;
  out << '\n';
  for (int j = 0; j < kJobs; ++j) {
    out << j + 1;
    for (int m = 0; m < kMachines; ++m) out << ',' << d.dur[j][m];
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

DurationMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);  // header
  DurationMatrix d;
  for (int j = 0; j < kJobs; ++j) {
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": expected 5 job rows");
    std::istringstream row(line);
    std::string cell;
    std::vector<int> cells;
    while (std::getline(row, cell, ',')) cells.push_back(std::stoi(cell));
    if (cells.size() != kMachines + 1 || cells[0] != j + 1)
      throw std::runtime_error(path.string() + ": malformed row " + std::to_string(j + 1));
    for (int m = 0; m < kMachines; ++m) d.dur[j][m] = cells[static_cast<std::size_t>(m) + 1];
  }
  if (!d.valid()) throw std::runtime_error(path.string() + ": durations must be positive");
  return d;
}

void write_pool_csv(const std::filesystem::path& path, const ReferencePool& pool) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (int m = 1; m <= kMachines; ++m)
    for (int p = 1; p <= kJobs; ++p) out << 'm' << m << 'p' << p << ',';
  out << "makespan\n";
  for (std::size_t i = 0; i < pool.schedules.size(); ++i) {
    for (const auto& perm : pool.schedules[i].order)
      for (int j : perm) out << j + 1 << ',';
    out << pool.makespans[i] << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// Matrix selection
// ---------------------------------------------------------------------------

double shape_distance(const DurationMatrix& d, std::uint64_t matrix_seed, const ShapeTarget& t) {
  if (t.thresholds.size() != t.cumulative.size() || t.probe_size == 0)
    throw std::invalid_argument("shape target needs one fraction per threshold and a non-empty probe");
  Rng rng(derive_seed(matrix_seed, 1));
  std::vector<std::size_t> hits(t.thresholds.size(), 0);
  for (std::size_t i = 0; i < t.probe_size; ++i) {
    const int f = makespan(random_schedule(rng), d);
    for (std::size_t k = 0; k < hits.size(); ++k) hits[k] += f <= t.thresholds[k];
  }
  double dist = 0.0;
  for (std::size_t k = 0; k < hits.size(); ++k) {
    const double p = (double(hits[k]) + 0.5) / (double(t.probe_size) + 1.0);
    const double l = std::log(p / t.cumulative[k]);
    dist += l * l;
  }
  return dist;
}

std::uint64_t closest_matrix_seed(std::uint64_t first, std::uint64_t last, const ShapeTarget& t, int lo, int hi) {
  if (last < first) throw std::invalid_argument("empty seed range");
  std::uint64_t best = first;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = first;; ++seed) {
    Rng rng(seed);
    const double dist = shape_distance(random_matrix(rng, lo, hi), seed, t);
    if (dist < best_dist) {
      best_dist = dist;
      best = seed;
    }
    if (seed == last) break;
  }
  return best;
}

}  // namespace eois::jobshop

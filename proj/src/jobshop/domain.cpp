#include "eois/jobshop.hpp"

#include <stdexcept>

namespace eois::jobshop {

Instance JobshopSpace::random(Rng& rng) const {
  return {static_cast<kb::Value>(random_schedule(rng).encode())};
}

std::optional<Instance> JobshopSpace::canonical(std::span<const kb::Value> grounding) const {
  if (grounding.size() != 1 || grounding[0] < 0 || static_cast<std::uint64_t>(grounding[0]) >= kScheduleCount)
    return std::nullopt;
  return Instance{grounding[0]};
}

JobshopProblem::JobshopProblem(DurationMatrix d, std::size_t pool_size, std::uint64_t pool_seed,
                               std::size_t threads)
    : d_(d) {
  if (!d_.valid()) throw std::invalid_argument("duration matrix entries must be >= 1");
  if (pool_size == 0) throw std::invalid_argument("reference pool must not be empty");
  pool_ = build_reference_pool(d_, pool_size, pool_seed, threads);
  grid_ = decile_grid(pool_, d_);
  kb_ = background_kb(d_, grid_);
}

Cost JobshopProblem::cost(const Instance& x) const {
  if (x.size() != 1) throw std::invalid_argument("job-shop instance must hold one schedule index");
  return makespan(Schedule::decode(static_cast<std::uint64_t>(x[0])), d_);
}

ReferenceCount JobshopProblem::reference(Cost theta) const {
  ReferenceCount r;
  r.size = pool_.schedules.size();
  r.count = theta < 0 ? 0 : pool_.count_at_most(static_cast<int>(std::min<Cost>(theta, 1 << 30)));
  r.from_pool = true;
  return r;
}

}  // namespace eois::jobshop

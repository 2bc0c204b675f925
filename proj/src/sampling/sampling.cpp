#include "eois/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "eois/parallel.hpp"

namespace eois {

const std::vector<Instance>& InstanceSpace::all() const {
  throw std::logic_error("instance space is not enumerable");
}

}  // namespace eois

namespace eois::sampling {

std::string mode_name(Mode m) { return m == Mode::Rejection ? "rejection" : "enumerate"; }

std::optional<Mode> parse_mode(const std::string& name) {
  if (name == "enumerate") return Mode::EnumerateSuccessSet;
  if (name == "rejection") return Mode::Rejection;
  return std::nullopt;
}

std::vector<std::string> SamplerConfig::validate() const {
  std::vector<std::string> errors;
  if (n < 1) errors.push_back("sampler.n must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) errors.push_back("sampler.delta must be in (0, 1]");
  if (max_rejection_attempts != 0 && max_rejection_attempts < n)
    errors.push_back("sampler.max_rejection_attempts must be >= n");
  if (threads < 1) errors.push_back("sampler.threads must be >= 1");
  return errors;
}

std::vector<Instance> uniform_sample(std::size_t n, const InstanceSpace& space, Rng& rng) {
  std::vector<Instance> out;
  if (space.enumerable()) {
    const std::vector<Instance>& all = space.all();
    std::vector<std::uint32_t> idx(all.size());
    std::iota(idx.begin(), idx.end(), 0u);
    const std::size_t take = std::min(n, idx.size());
    // Partial Fisher-Yates: the first `take` slots are a uniform draw.
    for (std::size_t i = 0; i < take; ++i) std::swap(idx[i], idx[i + uniform_below(rng, idx.size() - i)]);
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(all[idx[i]]);
    return out;
  }
  std::unordered_set<Instance, InstanceHash> seen;
  const std::uint64_t cap = 1000 * static_cast<std::uint64_t>(n) + 1000;
  for (std::uint64_t tries = 0; out.size() < n && tries < cap; ++tries) {
    Instance x = space.random(rng);
    if (seen.insert(x).second) out.push_back(std::move(x));
  }
  return out;
}

namespace {

SampleResult enumerate_mode(const SamplerConfig& cfg, const kb::Theory& theory, const kb::BackgroundKB& kb,
                            const InstanceSpace& space, Rng& rng) {
  SampleResult r;
  std::unordered_set<Instance, InstanceHash> seen;
  for (const kb::Clause& clause : theory.clauses) {
    if (r.instances.size() >= cfg.n) break;
    kb::for_each_ground_solution(clause, kb, ~std::uint64_t{0}, [&](std::span<const kb::Value> g) {
      ++r.attempts;
      std::optional<Instance> x = space.canonical(g);
      if (!x || seen.count(*x)) return true;
      // A symmetric image of the grounding stands in for it; it is only
      // kept if the theory entails the representative itself.
      if (!std::equal(x->begin(), x->end(), g.begin(), g.end()) && !kb::entails(theory, *x, kb)) return true;
      seen.insert(*x);
      if (cfg.delta < 1.0 && !(uniform01(rng) < cfg.delta)) return true;
      r.instances.push_back(std::move(*x));
      return r.instances.size() < cfg.n;
    });
  }
  return r;
}

SampleResult rejection_mode(const SamplerConfig& cfg, const kb::Theory& theory, const kb::BackgroundKB& kb,
                            const InstanceSpace& space, Rng& draw_rng, Rng& accept_rng) {
  SampleResult r;
  std::unordered_set<Instance, InstanceHash> seen;
  const std::uint64_t limit = cfg.attempt_limit();
  const std::size_t batch = std::max<std::size_t>(256, 64 * cfg.threads);
  std::vector<Instance> cand;
  std::vector<char> ok;
  while (r.instances.size() < cfg.n && r.attempts < limit) {
    const std::size_t m = static_cast<std::size_t>(std::min<std::uint64_t>(batch, limit - r.attempts));
    cand.clear();
    for (std::size_t i = 0; i < m; ++i) cand.push_back(space.random(draw_rng));
    ok.assign(m, 0);
    parallel_for(m, cfg.threads, [&](std::size_t i) { ok[i] = kb::entails(theory, cand[i], kb); });
    for (std::size_t i = 0; i < m && r.instances.size() < cfg.n; ++i) {
      ++r.attempts;
      if (!ok[i] || !seen.insert(cand[i]).second) continue;
      if (cfg.delta < 1.0 && !(uniform01(accept_rng) < cfg.delta)) continue;
      r.instances.push_back(std::move(cand[i]));
    }
  }
  r.exhausted = r.instances.size() < cfg.n;
  return r;
}

}  // namespace

SampleResult sample(const SamplerConfig& cfg, const kb::Theory& theory, const kb::BackgroundKB& kb,
                    const InstanceSpace& space) {
  Rng rng(derive_seed(cfg.rng_seed, 1));
  if (theory.empty()) {
    SampleResult r;
    r.uniform = true;
    r.instances = uniform_sample(cfg.n, space, rng);
    r.attempts = r.instances.size();
    return r;
  }
  if (cfg.mode == Mode::EnumerateSuccessSet) return enumerate_mode(cfg, theory, kb, space, rng);
  Rng accept_rng(derive_seed(cfg.rng_seed, 2));
  return rejection_mode(cfg, theory, kb, space, rng, accept_rng);
}

double estimate_success_probability(std::span<const Cost> costs, Cost theta) {
  if (costs.empty()) throw EmptySampleError("success probability of an empty sample is undefined");
  const auto hits = std::count_if(costs.begin(), costs.end(), [&](Cost c) { return c <= theta; });
  return double(hits) / double(costs.size());
}

double estimate_success_probability(std::span<const Instance> sample, Cost theta, const ObjectiveFn& f) {
  std::vector<Cost> costs;
  costs.reserve(sample.size());
  for (const Instance& x : sample) costs.push_back(f.cost(x));
  return estimate_success_probability(costs, theta);
}

}  // namespace eois::sampling

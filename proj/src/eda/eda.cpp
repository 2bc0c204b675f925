#include "eois/eda.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "eois/parallel.hpp"

namespace eois::eda {

std::vector<std::string> ThresholdSchedule::validate() const {
  std::vector<std::string> errors;
  if (thetas.empty()) errors.push_back("schedule.thetas must not be empty");
  for (std::size_t i = 1; i < thetas.size(); ++i)
    if (!(thetas[i] < thetas[i - 1])) {
      errors.push_back("schedule.thetas must be strictly decreasing");
      break;
    }
  if (!thetas.empty() && (theta_star > thetas.front() || theta_star < thetas.back()))
    errors.push_back("schedule.theta_star must lie between the last and first threshold");
  return errors;
}

std::vector<std::string> EoisConfig::validate() const {
  std::vector<std::string> errors = schedule.validate();
  for (auto& e : learner.validate()) errors.push_back(std::move(e));
  for (auto& e : sampler.validate()) errors.push_back(std::move(e));
  if (threads < 1) errors.push_back("threads must be >= 1");
  return errors;
}

learn::LabelledData label(const std::vector<Evaluated>& pool, Cost theta) {
  learn::LabelledData d;
  for (const Evaluated& e : pool) (e.cost <= theta ? d.positives : d.negatives).push_back(e.x);
  return d;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class Evaluator {
 public:
  Evaluator(const ObjectiveFn& f, std::size_t threads) : f_(f), threads_(threads) {}

  /// Costs for a population; each distinct instance is evaluated once per run.
  std::vector<Evaluated> evaluate(const std::vector<Instance>& xs) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (!cache_.count(xs[i])) todo.push_back(i);
    std::vector<Cost> fresh(todo.size());
    parallel_for(todo.size(), threads_, [&](std::size_t j) { fresh[j] = f_.cost(xs[todo[j]]); });
    for (std::size_t j = 0; j < todo.size(); ++j) {
      if (cache_.emplace(xs[todo[j]], fresh[j]).second) history_.push_back({xs[todo[j]], fresh[j]});
    }
    std::vector<Evaluated> out;
    out.reserve(xs.size());
    for (const Instance& x : xs) out.push_back({x, cache_.at(x)});
    return out;
  }

  /// Every distinct evaluated instance in first-evaluation order.
  const std::vector<Evaluated>& history() const { return history_; }
  std::size_t count() const { return history_.size(); }

 private:
  const ObjectiveFn& f_;
  std::size_t threads_;
  std::unordered_map<Instance, Cost, InstanceHash> cache_;
  std::vector<Evaluated> history_;
};

std::size_t count_at_most(const std::vector<Evaluated>& pop, Cost theta) {
  std::size_t n = 0;
  for (const Evaluated& e : pop) n += e.cost <= theta;
  return n;
}

}  // namespace

RunRecord run_eois(const EoisConfig& cfg, const Problem& problem, const Learner& learner,
                   std::vector<PhaseTimings>* timings) {
  if (auto errors = cfg.validate(); !errors.empty()) throw std::invalid_argument(errors.front());
  const Learner induce = learner ? learner : Learner(learn::induce);

  RunRecord rec;
  rec.problem = problem.name();
  rec.config = cfg;
  rec.initial_seed = derive_seed(cfg.seed, 0);

  Evaluator eval(problem.objective(), cfg.threads);
  {
    Rng rng(rec.initial_seed);
    rec.initial_population = eval.evaluate(sampling::uniform_sample(cfg.sampler.n, problem.space(), rng));
  }
  const Cost theta_star = cfg.schedule.theta_star;
  rec.initial_near_optimal = count_at_most(rec.initial_population, theta_star);
  const ReferenceCount star_ref = problem.reference(theta_star);

  std::unordered_set<Instance, InstanceHash> near_optimal;
  std::vector<Evaluated> previous = rec.initial_population;

  for (std::size_t i = 0; i < cfg.schedule.thetas.size(); ++i) {
    const Cost theta = cfg.schedule.thetas[i];
    if (theta < theta_star) break;
    IterationRecord it;
    it.k = i + 1;
    it.theta = theta;
    PhaseTimings pt;
    pt.k = it.k;

    auto t0 = Clock::now();
    const learn::LabelledData data = label(cfg.reuse_history ? eval.history() : previous, theta);
    it.training_size = data.positives.size() + data.negatives.size();
    it.positives = data.positives.size();
    it.negatives = data.negatives.size();
    learn::InduceResult model = induce(data, problem.background(), cfg.learner);
    for (const learn::ClauseReport& c : model.clauses) {
      const learn::ClauseScore full = learn::score_clause(c.clause, data, problem.background());
      it.theory.push_back({kb::to_text(c.clause, problem.background()), full.pos, full.neg, full.precision(),
                           full.compression(c.body_length), c.body_length, c.nodes});
    }
    it.ungeneralised = model.ungeneralised.size();
    it.searches = model.searches;
    it.search_nodes_total = model.total_nodes;
    it.search_nodes_max = model.max_nodes_per_search;
    pt.learn = seconds_since(t0);

    t0 = Clock::now();
    sampling::SamplerConfig scfg = cfg.sampler;
    it.sampler_seed = scfg.rng_seed = derive_seed(cfg.seed, it.k);
    scfg.threads = cfg.threads;
    sampling::SampleResult s = sampling::sample(scfg, model.theory, problem.background(), problem.space());
    it.uniform_fallback = s.uniform;
    it.sampler_exhausted = s.exhausted;
    it.sampler_attempts = s.attempts;
    pt.sample = seconds_since(t0);

    t0 = Clock::now();
    it.population = eval.evaluate(s.instances);
    pt.evaluate = seconds_since(t0);

    it.successes = count_at_most(it.population, theta);
    it.model_probability = it.population.empty() ? 0.0 : double(it.successes) / double(it.population.size());
    const ReferenceCount ref = problem.reference(theta);
    it.baseline_count = ref.count;
    it.baseline_size = ref.size;
    it.baseline_probability = ref.probability();
    for (const Evaluated& e : it.population)
      if (e.cost <= theta_star) near_optimal.insert(e.x);
    it.near_optimal_found = near_optimal.size();
    it.near_optimal_total = star_ref.count;
    it.near_optimal_total_from_pool = star_ref.from_pool;
    it.evaluations = eval.count();

    previous = it.population;
    rec.iterations.push_back(std::move(it));
    if (timings) timings->push_back(pt);
  }
  rec.evaluations = eval.count();

  // Best population: lowest cost reached, then most instances at that
  // cost, then earliest.
  auto key = [](const std::vector<Evaluated>& pop) {
    Cost best = std::numeric_limits<Cost>::max();
    for (const Evaluated& e : pop) best = std::min(best, e.cost);
    return std::pair<Cost, long>(best, -static_cast<long>(count_at_most(pop, best)));
  };
  auto best_key = key(rec.initial_population);
  for (const IterationRecord& it : rec.iterations) {
    if (const auto kk = key(it.population); kk < best_key) {
      best_key = kk;
      rec.best_iteration = it.k;
    }
  }
  return rec;
}

Gain gain_ratio(const RunRecord& record, std::size_t k) {
  if (k < 1 || k > record.iterations.size()) throw std::out_of_range("no such iteration");
  const IterationRecord& it = record.iterations[k - 1];
  Gain g;
  g.successes = it.successes;
  g.sample_size = it.population.size();
  g.baseline_count = it.baseline_count;
  g.baseline_size = it.baseline_size;
  if (it.baseline_probability > 0.0)
    g.value = it.model_probability / it.baseline_probability;
  else
    g.infinite = true;
  return g;
}

NearOptimal near_optimal_count(const RunRecord& record, std::size_t k, Cost theta_star,
                               const Problem& problem) {
  if (k > record.iterations.size()) throw std::out_of_range("no such iteration");
  std::unordered_set<Instance, InstanceHash> found;
  auto collect = [&](const std::vector<Evaluated>& pop) {
    for (const Evaluated& e : pop)
      if (e.cost <= theta_star) found.insert(e.x);
  };
  if (k == 0) collect(record.initial_population);
  for (std::size_t i = 0; i < k; ++i) collect(record.iterations[i].population);
  const ReferenceCount ref = problem.reference(theta_star);
  return {found.size(), ref.count, ref.from_pool};
}

double uniform_near_optimal_expectation(const ReferenceCount& ref, std::size_t evaluated) {
  return ref.probability() * double(evaluated);
}

}  // namespace eois::eda

#include <fstream>
#include <sstream>

#include "eois/cli.hpp"
#include "json.hpp"

namespace eois::cli {

using nlohmann::ordered_json;

namespace {

ordered_json eois_to_json(const eda::EoisConfig& e) {
  return {{"schedule", {{"thetas", e.schedule.thetas}, {"theta_star", e.schedule.theta_star}}},
          {"learner",
           {{"minacc", e.learner.minacc},
            {"max_clause_literals", e.learner.max_clause_literals},
            {"max_search_nodes", e.learner.max_search_nodes},
            {"variable_depth", e.learner.variable_depth}}},
          {"sampler",
           {{"n", e.sampler.n},
            {"delta", e.sampler.delta},
            {"mode", sampling::mode_name(e.sampler.mode)},
            {"max_rejection_attempts", e.sampler.max_rejection_attempts}}},
          {"reuse_history", e.reuse_history},
          {"seed", e.seed}};
}

eda::EoisConfig eois_from_json(const ordered_json& j) {
  eda::EoisConfig e;
  e.schedule.thetas = j.at("schedule").at("thetas").get<std::vector<Cost>>();
  e.schedule.theta_star = j.at("schedule").at("theta_star").get<Cost>();
  const auto& l = j.at("learner");
  e.learner.minacc = l.at("minacc").get<double>();
  e.learner.max_clause_literals = l.at("max_clause_literals").get<std::size_t>();
  e.learner.max_search_nodes = l.at("max_search_nodes").get<std::size_t>();
  e.learner.variable_depth = l.at("variable_depth").get<std::size_t>();
  const auto& s = j.at("sampler");
  e.sampler.n = s.at("n").get<std::size_t>();
  e.sampler.delta = s.at("delta").get<double>();
  const auto mode = sampling::parse_mode(s.at("mode").get<std::string>());
  if (!mode) throw std::runtime_error("record: unknown sampler mode");
  e.sampler.mode = *mode;
  e.sampler.max_rejection_attempts = s.at("max_rejection_attempts").get<std::uint64_t>();
  e.reuse_history = j.at("reuse_history").get<bool>();
  e.seed = j.at("seed").get<std::uint64_t>();
  return e;
}

// Each member is the instance's values followed by its cost.
ordered_json population_to_json(const std::vector<eda::Evaluated>& pop) {
  ordered_json a = ordered_json::array();
  for (const eda::Evaluated& e : pop) {
    ordered_json row = e.x;
    row.push_back(e.cost);
    a.push_back(std::move(row));
  }
  return a;
}

std::vector<eda::Evaluated> population_from_json(const ordered_json& a) {
  std::vector<eda::Evaluated> pop;
  pop.reserve(a.size());
  for (const auto& row : a) {
    auto values = row.get<std::vector<kb::Value>>();
    if (values.empty()) throw std::runtime_error("record: empty population row");
    eda::Evaluated e;
    e.cost = values.back();
    values.pop_back();
    e.x = std::move(values);
    pop.push_back(std::move(e));
  }
  return pop;
}

ordered_json clause_to_json(const eda::ClauseRecord& c) {
  return {{"text", c.text},           {"pos", c.pos},
          {"neg", c.neg},             {"precision", c.precision},
          {"compression", c.compression}, {"body_length", c.body_length},
          {"nodes", c.nodes}};
}

eda::ClauseRecord clause_from_json(const ordered_json& j) {
  eda::ClauseRecord c;
  c.text = j.at("text").get<std::string>();
  c.pos = j.at("pos").get<std::size_t>();
  c.neg = j.at("neg").get<std::size_t>();
  c.precision = j.at("precision").get<double>();
  c.compression = j.at("compression").get<long>();
  c.body_length = j.at("body_length").get<std::size_t>();
  c.nodes = j.at("nodes").get<std::size_t>();
  return c;
}

ordered_json iteration_to_json(const eda::IterationRecord& it) {
  ordered_json theory = ordered_json::array();
  for (const auto& c : it.theory) theory.push_back(clause_to_json(c));
  ordered_json j;
  j["k"] = it.k;
  j["theta"] = it.theta;
  j["sampler_seed"] = it.sampler_seed;
  j["training_size"] = it.training_size;
  j["positives"] = it.positives;
  j["negatives"] = it.negatives;
  j["theory"] = std::move(theory);
  j["ungeneralised"] = it.ungeneralised;
  j["searches"] = it.searches;
  j["search_nodes_total"] = it.search_nodes_total;
  j["search_nodes_max"] = it.search_nodes_max;
  j["uniform_fallback"] = it.uniform_fallback;
  j["sampler_exhausted"] = it.sampler_exhausted;
  j["sampler_attempts"] = it.sampler_attempts;
  j["successes"] = it.successes;
  j["model_probability"] = it.model_probability;
  j["baseline_count"] = it.baseline_count;
  j["baseline_size"] = it.baseline_size;
  j["baseline_probability"] = it.baseline_probability;
  j["near_optimal_found"] = it.near_optimal_found;
  j["near_optimal_total"] = it.near_optimal_total;
  j["near_optimal_total_from_pool"] = it.near_optimal_total_from_pool;
  j["evaluations"] = it.evaluations;
  j["population"] = population_to_json(it.population);
  return j;
}

eda::IterationRecord iteration_from_json(const ordered_json& j) {
  eda::IterationRecord it;
  it.k = j.at("k").get<std::size_t>();
  it.theta = j.at("theta").get<Cost>();
  it.sampler_seed = j.at("sampler_seed").get<std::uint64_t>();
  it.training_size = j.at("training_size").get<std::size_t>();
  it.positives = j.at("positives").get<std::size_t>();
  it.negatives = j.at("negatives").get<std::size_t>();
  for (const auto& c : j.at("theory")) it.theory.push_back(clause_from_json(c));
  it.ungeneralised = j.at("ungeneralised").get<std::size_t>();
  it.searches = j.at("searches").get<std::size_t>();
  it.search_nodes_total = j.at("search_nodes_total").get<std::size_t>();
  it.search_nodes_max = j.at("search_nodes_max").get<std::size_t>();
  it.uniform_fallback = j.at("uniform_fallback").get<bool>();
  it.sampler_exhausted = j.at("sampler_exhausted").get<bool>();
  it.sampler_attempts = j.at("sampler_attempts").get<std::uint64_t>();
  it.successes = j.at("successes").get<std::size_t>();
  it.model_probability = j.at("model_probability").get<double>();
  it.baseline_count = j.at("baseline_count").get<std::uint64_t>();
  it.baseline_size = j.at("baseline_size").get<std::uint64_t>();
  it.baseline_probability = j.at("baseline_probability").get<double>();
  it.near_optimal_found = j.at("near_optimal_found").get<std::size_t>();
  it.near_optimal_total = j.at("near_optimal_total").get<std::uint64_t>();
  it.near_optimal_total_from_pool = j.at("near_optimal_total_from_pool").get<bool>();
  it.evaluations = j.at("evaluations").get<std::size_t>();
  it.population = population_from_json(j.at("population"));
  return it;
}

}  // namespace

std::string record_to_json(const eda::RunRecord& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["problem"] = r.problem;
  j["config"] = eois_to_json(r.config);
  j["initial_seed"] = r.initial_seed;
  j["initial_near_optimal"] = r.initial_near_optimal;
  j["evaluations"] = r.evaluations;
  j["best_iteration"] = r.best_iteration;
  ordered_json its = ordered_json::array();
  for (const auto& it : r.iterations) its.push_back(iteration_to_json(it));
  j["iterations"] = std::move(its);
  j["initial_population"] = population_to_json(r.initial_population);
  return j.dump() + "\n";
}

eda::RunRecord record_from_json(const std::string& text) {
  try {
    const ordered_json j = ordered_json::parse(text);
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw std::runtime_error("record: unsupported schema");
    eda::RunRecord r;
    r.problem = j.at("problem").get<std::string>();
    r.config = eois_from_json(j.at("config"));
    r.initial_seed = j.at("initial_seed").get<std::uint64_t>();
    r.initial_near_optimal = j.at("initial_near_optimal").get<std::size_t>();
    r.evaluations = j.at("evaluations").get<std::size_t>();
    r.best_iteration = j.at("best_iteration").get<std::size_t>();
    for (const auto& it : j.at("iterations")) r.iterations.push_back(iteration_from_json(it));
    r.initial_population = population_from_json(j.at("initial_population"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed run record: ") + e.what());
  }
}

void save_record(const std::filesystem::path& path, const eda::RunRecord& r) {
  std::ofstream out(path, std::ios::binary);
  out << record_to_json(r);
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

eda::RunRecord load_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return record_from_json(text.str());
}

bool same_record(const eda::RunRecord& a, const eda::RunRecord& b) { return record_to_json(a) == record_to_json(b); }

}  // namespace eois::cli

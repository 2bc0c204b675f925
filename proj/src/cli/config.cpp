#include <fstream>
#include <set>
#include <sstream>

#include "eois/cli.hpp"
#include "json.hpp"

namespace eois::cli {

using nlohmann::ordered_json;

std::string domain_name(Domain d) { return d == Domain::Jobshop ? "jobshop" : "chess"; }

std::optional<Domain> parse_domain(const std::string& name) {
  if (name == "chess") return Domain::Chess;
  if (name == "jobshop") return Domain::Jobshop;
  return std::nullopt;
}

ExperimentConfig default_config(Domain d) {
  ExperimentConfig c;
  c.domain = d;
  eda::EoisConfig& e = c.eois;
  e.learner.minacc = 0.7;
  e.sampler.n = 1000;
  e.sampler.delta = 1.0;
  if (d == Domain::Chess) {
    e.schedule = {{8, 4, 0}, 0};
    e.learner.max_clause_literals = 4;
    e.learner.max_search_nodes = 5000;
    e.sampler.mode = sampling::Mode::EnumerateSuccessSet;
  } else {
    e.schedule = {{1000, 750, 600}, 600};
    e.learner.max_clause_literals = 10;
    e.learner.max_search_nodes = 10000;
    e.sampler.mode = sampling::Mode::Rejection;
  }
  return c;
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> errors = eois.validate();
  if (seeds.empty()) errors.push_back("seeds must not be empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    errors.push_back("seeds must be distinct");
  if (out_dir.empty()) errors.push_back("out_dir must not be empty");
  if (domain == Domain::Jobshop && pool_size == 0) errors.push_back("jobshop.pool_size must be >= 1");
  return errors;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  // Serialised form covers every field, so equality of text is equality.
  return config_to_json(*this) == config_to_json(o);
}

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  " + e;
        return msg;
      }()),
      errors_(std::move(errors)) {}

std::string config_to_json(const ExperimentConfig& c) {
  const eda::EoisConfig& e = c.eois;
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["domain"] = domain_name(c.domain);
  j["background"] = chess::background_name(c.background);
  j["schedule"] = {{"thetas", e.schedule.thetas}, {"theta_star", e.schedule.theta_star}};
  j["learner"] = {{"minacc", e.learner.minacc},
                  {"max_clause_literals", e.learner.max_clause_literals},
                  {"max_search_nodes", e.learner.max_search_nodes},
                  {"variable_depth", e.learner.variable_depth}};
  j["sampler"] = {{"n", e.sampler.n},
                  {"delta", e.sampler.delta},
                  {"mode", sampling::mode_name(e.sampler.mode)},
                  {"max_rejection_attempts", e.sampler.max_rejection_attempts}};
  j["reuse_history"] = e.reuse_history;
  j["threads"] = e.threads;
  j["seeds"] = c.seeds;
  j["out_dir"] = c.out_dir;
  j["tablebase_cache"] = c.tablebase_cache;
  j["jobshop"] = {{"matrix_file", c.matrix_file},
                  {"matrix_seed", c.matrix_seed},
                  {"pool_size", c.pool_size},
                  {"pool_seed", c.pool_seed}};
  return j.dump(2) + "\n";
}

namespace {

// Reads fields one at a time so that every bad field is reported, not only
// the first.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  template <class T>
  void get(const ordered_json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      errors_.push_back(path + key + ": wrong type");
    }
  }

  template <class Parse, class T>
  void get_enum(const ordered_json& obj, const std::string& path, const char* key, Parse parse, T& out) {
    std::string name;
    if (!obj.contains(key)) return;
    get(obj, path, key, name);
    if (auto v = parse(name)) out = *v;
    else if (!name.empty()) errors_.push_back(path + key + ": unknown value '" + name + "'");
  }

  const ordered_json* section(const ordered_json& j, const char* key) {
    if (!j.contains(key)) return nullptr;
    if (!j.at(key).is_object()) {
      errors_.push_back(std::string(key) + ": expected an object");
      return nullptr;
    }
    return &j.at(key);
  }

  void unknown_keys(const ordered_json& obj, const std::string& path, std::initializer_list<const char*> known) {
    for (const auto& [k, v] : obj.items()) {
      bool ok = false;
      for (const char* name : known) ok = ok || k == name;
      if (!ok) errors_.push_back(path + k + ": unknown field");
    }
  }

 private:
  std::vector<std::string>& errors_;
};

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({std::string("not valid JSON: ") + e.what()});
  }
  if (!j.is_object()) throw ConfigError({"top level must be an object"});

  std::vector<std::string> errors;
  Reader r(errors);

  int version = kSchemaVersion;
  r.get(j, "", "schema_version", version);
  if (version != kSchemaVersion)
    errors.push_back("schema_version: expected " + std::to_string(kSchemaVersion) + ", got " +
                     std::to_string(version));

  Domain domain = Domain::Chess;
  r.get_enum(j, "", "domain", parse_domain, domain);
  ExperimentConfig c = default_config(domain);
  eda::EoisConfig& e = c.eois;

  r.get_enum(j, "", "background", chess::parse_background, c.background);
  if (const auto* s = r.section(j, "schedule")) {
    r.get(*s, "schedule.", "thetas", e.schedule.thetas);
    r.get(*s, "schedule.", "theta_star", e.schedule.theta_star);
    r.unknown_keys(*s, "schedule.", {"thetas", "theta_star"});
  }
  if (const auto* s = r.section(j, "learner")) {
    r.get(*s, "learner.", "minacc", e.learner.minacc);
    r.get(*s, "learner.", "max_clause_literals", e.learner.max_clause_literals);
    r.get(*s, "learner.", "max_search_nodes", e.learner.max_search_nodes);
    r.get(*s, "learner.", "variable_depth", e.learner.variable_depth);
    r.unknown_keys(*s, "learner.", {"minacc", "max_clause_literals", "max_search_nodes", "variable_depth"});
  }
  if (const auto* s = r.section(j, "sampler")) {
    r.get(*s, "sampler.", "n", e.sampler.n);
    r.get(*s, "sampler.", "delta", e.sampler.delta);
    r.get_enum(*s, "sampler.", "mode", sampling::parse_mode, e.sampler.mode);
    r.get(*s, "sampler.", "max_rejection_attempts", e.sampler.max_rejection_attempts);
    r.unknown_keys(*s, "sampler.", {"n", "delta", "mode", "max_rejection_attempts"});
  }
  r.get(j, "", "reuse_history", e.reuse_history);
  r.get(j, "", "threads", e.threads);
  r.get(j, "", "seeds", c.seeds);
  r.get(j, "", "out_dir", c.out_dir);
  r.get(j, "", "tablebase_cache", c.tablebase_cache);
  if (const auto* s = r.section(j, "jobshop")) {
    r.get(*s, "jobshop.", "matrix_file", c.matrix_file);
    r.get(*s, "jobshop.", "matrix_seed", c.matrix_seed);
    r.get(*s, "jobshop.", "pool_size", c.pool_size);
    r.get(*s, "jobshop.", "pool_seed", c.pool_seed);
    r.unknown_keys(*s, "jobshop.", {"matrix_file", "matrix_seed", "pool_size", "pool_seed"});
  }
  r.unknown_keys(j, "", {"schema_version", "domain", "background", "schedule", "learner", "sampler", "reuse_history",
                         "threads", "seeds", "out_dir", "tablebase_cache", "jobshop"});

  for (auto& msg : c.validate()) errors.push_back(std::move(msg));
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read " + path.string()});
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_json(text.str());
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& c) {
  std::ofstream out(path);
  out << config_to_json(c);
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void apply(ExperimentConfig& c, const Overrides& o) {
  if (o.seed) c.seeds = {*o.seed};
  if (o.out_dir) c.out_dir = *o.out_dir;
  if (o.threads) {
    c.eois.threads = *o.threads;
    c.eois.sampler.threads = *o.threads;
  }
}

}  // namespace eois::cli

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "eois/cli.hpp"

using namespace eois;
using namespace eois::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("eois_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const fs::path& tablebase_file() {
  static const fs::path p = [] {
    const fs::path dir = scratch("tb");
    std::ostringstream out, err;
    REQUIRE(cmd_tablebase(dir, out, err) == 0);
    return dir / "krk.tb";
  }();
  return p;
}

ExperimentConfig chess_run(const fs::path& out, std::uint64_t seed) {
  ExperimentConfig c = default_config(Domain::Chess);
  c.seeds = {seed};
  c.out_dir = out.string();
  c.tablebase_cache = tablebase_file().string();
  return c;
}

}  // namespace

TEST_CASE("defaults validate and round trip through JSON") {
  for (Domain d : {Domain::Chess, Domain::Jobshop}) {
    const ExperimentConfig c = default_config(d);
    CHECK(c.validate().empty());
    CHECK(config_from_json(config_to_json(c)) == c);
  }
  ExperimentConfig c = default_config(Domain::Jobshop);
  c.seeds = {3, 9};
  c.eois.sampler.delta = 0.5;
  c.matrix_seed = 77;
  const fs::path dir = scratch("cfg");
  save_config(dir / "c.json", c);
  CHECK(load_config(dir / "c.json") == c);
}

TEST_CASE("missing fields take the domain defaults") {
  const ExperimentConfig c = config_from_json(R"({"domain": "jobshop", "seeds": [4]})");
  ExperimentConfig expected = default_config(Domain::Jobshop);
  expected.seeds = {4};
  CHECK(c == expected);
}

TEST_CASE("every offending field is reported") {
  try {
    config_from_json(R"({"schedule": {"thetas": [4, 8], "theta_star": 0},
                         "learner": {"minacc": 1.5},
                         "sampler": {"n": 0, "mode": "bogus"},
                         "seeds": []})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(e.errors().size() >= 5);
    CHECK(msg.find("schedule") != std::string::npos);
    CHECK(msg.find("minacc") != std::string::npos);
    CHECK(msg.find("sampler.n") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);
    CHECK(msg.find("seeds") != std::string::npos);
  }
}

TEST_CASE("unknown fields, wrong types and bad JSON are errors") {
  CHECK_THROWS_AS(config_from_json(R"({"learnr": {}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"learner": {"minac": 0.7}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"sampler": {"n": "many"}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"schema_version": 99})"), ConfigError);
  CHECK_THROWS_AS(config_from_json("{not json"), ConfigError);
  CHECK_THROWS_AS(config_from_json("[]"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/eois.json"), ConfigError);
}

TEST_CASE("overrides") {
  ExperimentConfig c = default_config(Domain::Chess);
  apply(c, {5, std::string("elsewhere"), 3});
  CHECK(c.seeds == std::vector<std::uint64_t>{5});
  CHECK(c.out_dir == "elsewhere");
  CHECK(c.eois.threads == 3);
  CHECK(c.eois.sampler.threads == 3);
}

TEST_CASE("distribution report") {
  const fs::path dir = tablebase_file().parent_path();
  const std::string csv = slurp(dir / "krk_distribution.csv");
  CHECK(csv.rfind("cost,count,cumulative\n0,27,0.001\n", 0) == 0);
  CHECK(csv.find("draw,2796,1.000") != std::string::npos);
  CHECK(slurp(dir / "krk_distribution.txt").find("total instances: 28056") != std::string::npos);
  const std::string positions = slurp(dir / "krk_positions.csv");
  CHECK(positions.rfind("wk_file,wk_rank,wr_file,wr_rank,bk_file,bk_rank,cost\n", 0) == 0);
  CHECK(std::count(positions.begin(), positions.end(), '\n') == 28057);
}

TEST_CASE("chess run writes reproducible reports") {
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  std::ostringstream out, err;
  REQUIRE(cmd_run(chess_run(a, 2), out, err) == 0);
  REQUIRE(cmd_run(chess_run(b, 2), out, err) == 0);
  const fs::path ra = a / "chess-high-seed2", rb = b / "chess-high-seed2";
  for (const char* f : {"record.json", "iterations.txt", "iterations.csv", "near_optimal.txt", "near_optimal.csv",
                        "theory.pl"})
    CHECK_MESSAGE(slurp(ra / f) == slurp(rb / f), f);
  CHECK(fs::exists(ra / "timings.txt"));

  const eda::RunRecord rec = load_record(ra / "record.json");
  CHECK(record_to_json(rec) == slurp(ra / "record.json"));
  CHECK(same_record(rec, load_record(rb / "record.json")));
  CHECK(rec.iterations.size() == 3);

  // The stored config names the seed of this run and reloads.
  CHECK(load_config(ra / "config.json").seeds == std::vector<std::uint64_t>{2});

  // Comparing a run with itself gives unit ratios.
  const Table t = compare_table(rec, rec);
  for (const auto& row : t.rows) {
    CHECK(row[4] == "1");
    CHECK(row[7] == "1");
  }
  std::ostringstream cmp;
  CHECK(cmd_compare(ra, rb / "record.json", std::nullopt, cmp, err) == 0);

  eda::RunRecord other = rec;
  other.config.schedule.thetas = {8, 4, 1};
  CHECK_THROWS_AS(compare_table(rec, other), ComparisonError);
  save_record(a / "other.json", other);
  std::ostringstream e2;
  CHECK(cmd_compare(ra, a / "other.json", std::nullopt, cmp, e2) == 1);
  CHECK(e2.str().find("cannot compare") != std::string::npos);
}

TEST_CASE("record reports") {
  eda::RunRecord r;
  r.problem = "toy";
  r.config.schedule = {{8, 4}, 4};
  r.initial_population = {{{1}, 9}, {{2}, 3}};
  r.initial_near_optimal = 1;
  r.iterations.resize(2);
  for (std::size_t i = 0; i < 2; ++i) {
    auto& it = r.iterations[i];
    it.k = i + 1;
    it.theta = r.config.schedule.thetas[i];
    it.model_probability = 0.5;
    it.baseline_probability = i == 0 ? 0.25 : 0.0;
    it.near_optimal_found = 1 + i;
    it.near_optimal_total = 10;
    it.population = {{{kb::Value(10 + i)}, 2}};
  }
  r.iterations[1].uniform_fallback = true;
  const Table it = iteration_table(r);
  REQUIRE(it.rows.size() == 2);
  CHECK(it.rows[0][4] == "2");
  CHECK(it.rows[1][4] == "inf");
  CHECK(it.rows[1][9] == "yes");
  const Table near = near_optimal_table(r);
  REQUIRE(near.rows.size() == 3);
  CHECK(near.rows[0][2] == "1");
  CHECK(near.rows[2][4] == "0.2");
  CHECK(theory_dump(r).find("empty theory") != std::string::npos);

  CHECK(same_record(record_from_json(record_to_json(r)), r));
  CHECK_THROWS_AS(record_from_json("{}"), std::runtime_error);

  Table t;
  t.columns = {"a", "b"};
  t.rows = {{"x,y", "say \"hi\""}};
  CHECK(t.csv() == "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
}

TEST_CASE("exit codes") {
  std::ostringstream out, err;
  ExperimentConfig bad = default_config(Domain::Chess);
  bad.eois.sampler.n = 0;
  CHECK(cmd_run(bad, out, err) == 1);
  CHECK(err.str().find("sampler") != std::string::npos);
  CHECK(cmd_export_pool(default_config(Domain::Chess), out, err) == 1);
  CHECK(cmd_compare("/nonexistent/a", "/nonexistent/b", std::nullopt, out, err) == 2);
}

TEST_CASE("jobshop export and run") {
  const fs::path dir = scratch("js");
  ExperimentConfig c = default_config(Domain::Jobshop);
  c.out_dir = dir.string();
  c.pool_size = 2000;
  c.eois.sampler.n = 100;
  c.eois.schedule = {{1000, 900}, 900};
  std::ostringstream out, err;
  REQUIRE(cmd_export_pool(c, out, err) == 0);
  CHECK(out.str().find("P(makespan <= 1000)") != std::string::npos);
  CHECK(jobshop::read_matrix_csv(dir / "jobshop_matrix.csv").dur == experiment_matrix(c).dur);
  CHECK(fs::exists(dir / "jobshop_pool.csv"));

  c.matrix_file = (dir / "jobshop_matrix.csv").string();
  REQUIRE(cmd_run(c, out, err) == 0);
  const fs::path run = dir / "jobshop-seed1";
  CHECK(jobshop::read_matrix_csv(run / "matrix.csv").dur == experiment_matrix(c).dur);
  const eda::RunRecord rec = load_record(run / "record.json");
  CHECK(rec.iterations.size() == 2);
  CHECK(rec.iterations[0].near_optimal_total_from_pool);
}

#include <fstream>
#include <ostream>

#include "eois/cli.hpp"

namespace eois::cli {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

fs::path tablebase_path(const ExperimentConfig& c) {
  return c.tablebase_cache.empty() ? fs::path(c.out_dir) / "krk.tb" : fs::path(c.tablebase_cache);
}

std::shared_ptr<const chess::Tablebase> load_tablebase(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  return std::make_shared<const chess::Tablebase>(chess::Tablebase::load_or_build(path));
}

void write_table(const fs::path& dir, const std::string& stem, const Table& t) {
  write_file(dir / (stem + ".txt"), t.text());
  write_file(dir / (stem + ".csv"), t.csv());
}

// Input errors exit with 1, everything else with 2.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const ComparisonError& e) {
    err << "cannot compare: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

fs::path run_directory(const ExperimentConfig& c, const std::string& problem, std::uint64_t seed) {
  return fs::path(c.out_dir) / (problem + "-seed" + std::to_string(seed));
}

jobshop::DurationMatrix experiment_matrix(const ExperimentConfig& c) {
  if (!c.matrix_file.empty()) return jobshop::read_matrix_csv(c.matrix_file);
  Rng rng(c.matrix_seed);
  return jobshop::random_matrix(rng);
}

std::unique_ptr<Problem> make_problem(const ExperimentConfig& c) {
  if (c.domain == Domain::Chess) return std::make_unique<chess::ChessProblem>(load_tablebase(tablebase_path(c)), c.background);
  return std::make_unique<jobshop::JobshopProblem>(experiment_matrix(c), c.pool_size, c.pool_seed, c.eois.threads);
}

int cmd_tablebase(const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    fs::create_directories(out_dir);
    const auto tb = load_tablebase(out_dir / "krk.tb");
    const auto positions = chess::enumerate_canonical();
    const Table t = distribution_table(chess::class_counts(*tb, positions));
    write_table(out_dir, "krk_distribution", t);
    chess::write_csv(out_dir / "krk_positions.csv", *tb, positions);
    out << t.text();
    return 0;
  });
}

int cmd_run(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (auto errors = c.validate(); !errors.empty()) throw ConfigError(std::move(errors));
    fs::create_directories(c.out_dir);
    const std::unique_ptr<Problem> problem = make_problem(c);
    for (std::uint64_t seed : c.seeds) {
      eda::EoisConfig e = c.eois;
      e.seed = seed;
      e.sampler.threads = e.threads;
      std::vector<eda::PhaseTimings> timings;
      eda::RunRecord record;
      try {
        record = eda::run_eois(e, *problem, {}, &timings);
      } catch (const std::exception& ex) {
        throw std::runtime_error(problem->name() + " seed " + std::to_string(seed) + ", after iteration " +
                                 std::to_string(timings.size()) + ": " + ex.what());
      }
      const fs::path dir = run_directory(c, problem->name(), seed);
      fs::create_directories(dir);
      ExperimentConfig used = c;
      used.seeds = {seed};
      save_config(dir / "config.json", used);
      save_record(dir / "record.json", record);
      write_table(dir, "iterations", iteration_table(record));
      write_table(dir, "near_optimal", near_optimal_table(record));
      write_file(dir / "theory.pl", theory_dump(record));
      write_table(dir, "timings", timing_table(timings));
      if (const auto* js = dynamic_cast<const jobshop::JobshopProblem*>(problem.get()))
        jobshop::write_matrix_csv(dir / "matrix.csv", js->matrix());

      out << iteration_table(record).text() << '\n' << near_optimal_table(record).text() << '\n';
      out << "written to " << dir.string() << "\n\n";
    }
    return 0;
  });
}

int cmd_compare(const fs::path& a, const fs::path& b, const std::optional<std::string>& out_dir, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    auto record_path = [](const fs::path& p) { return fs::is_directory(p) ? p / "record.json" : p; };
    const eda::RunRecord ra = load_record(record_path(a));
    const eda::RunRecord rb = load_record(record_path(b));
    const Table t = compare_table(ra, rb);
    if (out_dir) {
      fs::create_directories(*out_dir);
      write_table(*out_dir, "compare", t);
    }
    out << t.text();
    return 0;
  });
}

int cmd_export_pool(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (c.domain != Domain::Jobshop) throw ConfigError({"domain: export-pool needs a jobshop config"});
    if (auto errors = c.validate(); !errors.empty()) throw ConfigError(std::move(errors));
    fs::create_directories(c.out_dir);
    const jobshop::DurationMatrix d = experiment_matrix(c);
    const jobshop::ReferencePool pool = jobshop::build_reference_pool(d, c.pool_size, c.pool_seed, c.eois.threads);
    const fs::path dir(c.out_dir);
    jobshop::write_matrix_csv(dir / "jobshop_matrix.csv", d);
    jobshop::write_pool_csv(dir / "jobshop_pool.csv", pool);

    // Makespan histogram in bins of 50 with cumulative frequency.
    Table h;
    h.header = {"reference pool: " + std::to_string(pool.schedules.size()) + " schedules, seed " +
                std::to_string(pool.seed)};
    h.columns = {"makespan_from", "makespan_to", "count", "cumulative"};
    const int lo = pool.sorted_makespans.front() / 50 * 50;
    const int hi = pool.sorted_makespans.back();
    for (int from = lo; from <= hi; from += 50) {
      const auto below = pool.count_at_most(from - 1);
      const auto upto = pool.count_at_most(from + 49);
      char cum[32];
      std::snprintf(cum, sizeof cum, "%.5f", double(upto) / double(pool.schedules.size()));
      h.rows.push_back({std::to_string(from), std::to_string(from + 49), std::to_string(upto - below), cum});
    }
    write_table(dir, "jobshop_histogram", h);
    out << h.text();
    for (Cost theta : c.eois.schedule.thetas)
      out << "P(makespan <= " << theta << ") = " << pool.count_at_most(static_cast<int>(theta)) << "/"
          << pool.schedules.size() << '\n';
    return 0;
  });
}

}  // namespace eois::cli

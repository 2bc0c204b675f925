#pragma once

// Experiment harness: configuration files, persisted run records, report
// tables and the subcommands behind the command-line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eois/chess.hpp"
#include "eois/eda.hpp"
#include "eois/jobshop.hpp"

namespace eois::cli {

inline constexpr int kSchemaVersion = 1;

/// Shipped matrix: jobshop::closest_matrix_seed(1, 20000) with the default
/// target.
inline constexpr std::uint64_t kDefaultMatrixSeed = 10361;

enum class Domain { Chess, Jobshop };

std::string domain_name(Domain d);
std::optional<Domain> parse_domain(const std::string& name);

struct ExperimentConfig {
  Domain domain = Domain::Chess;
  chess::Background background = chess::Background::High;
  eda::EoisConfig eois;
  /// One run per seed.  eois.seed is ignored by the harness.
  std::vector<std::uint64_t> seeds{1};
  std::string out_dir = "runs";

  // Chess: where the tablebase cache lives ("" = <out_dir>/krk.tb).
  std::string tablebase_cache;

  // Job-shop: a matrix file, if given, wins over the seed.
  std::string matrix_file;
  std::uint64_t matrix_seed = kDefaultMatrixSeed;
  std::size_t pool_size = 100000;
  std::uint64_t pool_seed = 7;

  /// Empty when valid; otherwise one message per offending field.
  std::vector<std::string> validate() const;
  bool operator==(const ExperimentConfig&) const;
};

/// Settings used throughout the paper for each domain.
ExperimentConfig default_config(Domain d);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// JSON text.  Parsing fills unspecified fields from default_config(domain)
/// and throws ConfigError listing every problem it finds.
std::string config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& c);

// ---------------------------------------------------------------------------
// Run records
// ---------------------------------------------------------------------------

std::string record_to_json(const eda::RunRecord& r);
eda::RunRecord record_from_json(const std::string& text);
void save_record(const std::filesystem::path& path, const eda::RunRecord& r);
eda::RunRecord load_record(const std::filesystem::path& path);

bool same_record(const eda::RunRecord& a, const eda::RunRecord& b);

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

struct Table {
  std::vector<std::string> header;  // comment lines printed above the text form
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string text() const;
  std::string csv() const;
};

/// Precision per iteration: baseline, model, gain, training and theory sizes,
/// evaluation counts.
Table iteration_table(const eda::RunRecord& r);
/// Distinct instances at or below theta* found by each iteration.
Table near_optimal_table(const eda::RunRecord& r);
/// Learned clauses with their training counts, per iteration.
std::string theory_dump(const eda::RunRecord& r);

class ComparisonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Paired model probability and recall with ratios b/a; both runs must share
/// the threshold schedule.
Table compare_table(const eda::RunRecord& a, const eda::RunRecord& b);

/// Count and cumulative frequency per cost class of the KRK space.
Table distribution_table(const std::array<std::uint64_t, chess::kDraw + 1>& counts);

Table timing_table(const std::vector<eda::PhaseTimings>& t);

// ---------------------------------------------------------------------------
// Subcommands.  Each returns a process exit code: 0 success, 1 invalid input,
// 2 runtime failure; messages go to `err`.
// ---------------------------------------------------------------------------

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> threads;
};

void apply(ExperimentConfig& c, const Overrides& o);

int cmd_tablebase(const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);
int cmd_run(const ExperimentConfig& c, std::ostream& out, std::ostream& err);
int cmd_compare(const std::filesystem::path& a, const std::filesystem::path& b, const std::optional<std::string>& out_dir,
                std::ostream& out, std::ostream& err);
int cmd_export_pool(const ExperimentConfig& c, std::ostream& out, std::ostream& err);

/// The duration matrix a job-shop config refers to: its file if given,
/// otherwise random_matrix seeded with matrix_seed.
jobshop::DurationMatrix experiment_matrix(const ExperimentConfig& c);

/// Builds the problem a config describes (tablebase loaded or built for chess).
std::unique_ptr<Problem> make_problem(const ExperimentConfig& c);

/// Directory a run writes into: <out_dir>/<problem>-seed<N>.
std::filesystem::path run_directory(const ExperimentConfig& c, const std::string& problem, std::uint64_t seed);

}  // namespace eois::cli

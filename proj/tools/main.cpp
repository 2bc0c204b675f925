#include <iostream>

#include "CLI11.hpp"
#include "eois/cli.hpp"

namespace {

struct RunArgs {
  std::string config;
  std::string domain = "chess";
  std::string background;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
};

void add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--config", a.config, "experiment config (JSON)");
  cmd->add_option("--domain", a.domain, "chess or jobshop, when no config is given")
      ->check(CLI::IsMember({"chess", "jobshop"}));
  cmd->add_option("--background", a.background, "chess background: high or low")
      ->check(CLI::IsMember({"high", "low"}));
  cmd->add_option("--seed", a.seed, "run a single seed instead of the config's list");
  cmd->add_option("--out", a.out, "output directory");
  cmd->add_option("--threads", a.threads, "worker threads")->check(CLI::PositiveNumber);
}

eois::cli::ExperimentConfig resolve(const RunArgs& a) {
  using namespace eois::cli;
  ExperimentConfig c = a.config.empty() ? default_config(*parse_domain(a.domain)) : load_config(a.config);
  if (!a.background.empty()) c.background = *eois::chess::parse_background(a.background);
  apply(c, {a.seed, a.out, a.threads});
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimisation with inductive subsampling: experiments on KRK and 5x5 job-shop"};
  app.require_subcommand(1);

  std::string tb_out = "runs";
  auto* tablebase = app.add_subcommand("tablebase", "build the KRK tablebase and its cost distribution");
  tablebase->add_option("--out", tb_out, "output directory");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run the optimisation loop for every configured seed");
  add_run_options(run, run_args);

  std::string run_a, run_b;
  std::optional<std::string> cmp_out;
  auto* compare = app.add_subcommand("compare", "compare two runs side by side");
  compare->add_option("a", run_a, "run directory or record.json")->required();
  compare->add_option("b", run_b, "run directory or record.json")->required();
  compare->add_option("--out", cmp_out, "also write compare.txt/.csv here");

  RunArgs pool_args;
  pool_args.domain = "jobshop";
  auto* pool = app.add_subcommand("export-pool", "write the job-shop matrix and reference pool as CSV");
  add_run_options(pool, pool_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors share the exit code of invalid configs.
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*tablebase) return eois::cli::cmd_tablebase(tb_out, std::cout, std::cerr);
    if (*run) return eois::cli::cmd_run(resolve(run_args), std::cout, std::cerr);
    if (*compare) return eois::cli::cmd_compare(run_a, run_b, cmp_out, std::cout, std::cerr);
    if (*pool) return eois::cli::cmd_export_pool(resolve(pool_args), std::cout, std::cerr);
  } catch (const eois::cli::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 1;
}

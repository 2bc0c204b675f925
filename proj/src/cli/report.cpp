#include <algorithm>
#include <cstdio>
#include <sstream>

#include "eois/cli.hpp"

namespace eois::cli {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <class T>
std::string str(T v) {
  return std::to_string(v);
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

/// b / a.  Equal values give 1 (zero over zero included); a zero
/// denominator otherwise gives "inf".
std::string ratio(double a, double b) {
  if (a == b) return num(1.0);
  if (a == 0.0) return "inf";
  return num(b / a);
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> run_header(const eda::RunRecord& r) {
  std::ostringstream sched;
  for (std::size_t i = 0; i < r.config.schedule.thetas.size(); ++i)
    sched << (i ? "," : "") << r.config.schedule.thetas[i];
  return {"problem: " + r.problem, "seed: " + str(r.config.seed),
          "schedule: <" + sched.str() + ">  theta*: " + str(r.config.schedule.theta_star),
          "n: " + str(r.config.sampler.n) + "  mode: " + sampling::mode_name(r.config.sampler.mode)};
}

}  // namespace

std::string Table::text() const {
  std::vector<std::size_t> width(columns.size(), 0);
  for (std::size_t c = 0; c < columns.size(); ++c) width[c] = columns[c].size();
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());

  std::ostringstream out;
  for (const auto& h : header) out << "# " << h << '\n';
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) s += "  ";
      s += std::string(width[c] - cells[c].size(), ' ') + cells[c];
    }
    out << s << '\n';
  };
  line(columns);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  out << std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') << '\n';
  for (const auto& row : rows) line(row);
  return out.str();
}

std::string Table::csv() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "," : "") << csv_cell(cells[c]);
    out << '\n';
  };
  line(columns);
  for (const auto& row : rows) line(row);
  return out.str();
}

Table iteration_table(const eda::RunRecord& r) {
  Table t;
  t.header = run_header(r);
  t.columns = {"k",       "theta",     "baseline", "model",    "gain",      "train",     "pos",
               "neg",     "clauses",   "fallback", "exhausted", "attempts", "evaluations"};
  for (const auto& it : r.iterations) {
    const eda::Gain g = eda::gain_ratio(r, it.k);
    t.rows.push_back({str(it.k), str(it.theta), num(it.baseline_probability), num(it.model_probability),
                      g.infinite ? "inf" : num(g.value), str(it.training_size), str(it.positives),
                      str(it.negatives), str(it.theory.size()), yes_no(it.uniform_fallback),
                      yes_no(it.sampler_exhausted), str(it.sampler_attempts), str(it.evaluations)});
  }
  return t;
}

Table near_optimal_table(const eda::RunRecord& r) {
  Table t;
  t.header = run_header(r);
  t.columns = {"k", "theta", "found", "total", "recall", "evaluations"};
  const std::uint64_t total = r.iterations.empty() ? 0 : r.iterations.front().near_optimal_total;
  const bool pool = !r.iterations.empty() && r.iterations.front().near_optimal_total_from_pool;
  if (pool) t.header.push_back("total counted in the reference pool");
  auto recall = [&](std::size_t found) { return total ? num(double(found) / double(total)) : std::string("-"); };
  t.rows.push_back({"0", "-", str(r.initial_near_optimal), str(total), recall(r.initial_near_optimal),
                    str(r.initial_population.size())});
  for (const auto& it : r.iterations)
    t.rows.push_back({str(it.k), str(it.theta), str(it.near_optimal_found), str(it.near_optimal_total),
                      recall(it.near_optimal_found), str(it.evaluations)});
  return t;
}

std::string theory_dump(const eda::RunRecord& r) {
  std::ostringstream out;
  for (const auto& h : run_header(r)) out << "% " << h << '\n';
  for (const auto& it : r.iterations) {
    out << "\n% k=" << it.k << " theta=" << it.theta << " positives=" << it.positives
        << " negatives=" << it.negatives << " clauses=" << it.theory.size()
        << " ungeneralised=" << it.ungeneralised << '\n';
    if (it.theory.empty()) out << "% empty theory: population drawn uniformly\n";
    for (const auto& c : it.theory)
      out << "% pos=" << c.pos << " neg=" << c.neg << " precision=" << fixed(c.precision, 4)
          << " length=" << c.body_length << " nodes=" << c.nodes << '\n'
          << c.text << '\n';
  }
  return out.str();
}

Table compare_table(const eda::RunRecord& a, const eda::RunRecord& b) {
  if (a.config.schedule.thetas != b.config.schedule.thetas ||
      a.config.schedule.theta_star != b.config.schedule.theta_star)
    throw ComparisonError("runs use different threshold schedules");
  if (a.iterations.size() != b.iterations.size())
    throw ComparisonError("runs have different numbers of iterations");
  Table t;
  t.header = {"a: " + a.problem + " seed " + str(a.config.seed), "b: " + b.problem + " seed " + str(b.config.seed),
              "ratios are b/a"};
  t.columns = {"k", "theta", "model_a", "model_b", "model_ratio", "near_a", "near_b", "near_ratio"};
  for (std::size_t i = 0; i < a.iterations.size(); ++i) {
    const auto& x = a.iterations[i];
    const auto& y = b.iterations[i];
    t.rows.push_back({str(x.k), str(x.theta), num(x.model_probability), num(y.model_probability),
                      ratio(x.model_probability, y.model_probability), str(x.near_optimal_found),
                      str(y.near_optimal_found),
                      ratio(double(x.near_optimal_found), double(y.near_optimal_found))});
  }
  return t;
}

Table distribution_table(const std::array<std::uint64_t, chess::kDraw + 1>& counts) {
  Table t;
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  t.header = {"total instances: " + str(total)};
  t.columns = {"cost", "count", "cumulative"};
  std::uint64_t running = 0;
  for (int c = 0; c <= chess::kDraw; ++c) {
    running += counts[static_cast<std::size_t>(c)];
    t.rows.push_back({c == chess::kDraw ? "draw" : str(c), str(counts[static_cast<std::size_t>(c)]),
                      fixed(total ? double(running) / double(total) : 0.0, 3)});
  }
  return t;
}

Table timing_table(const std::vector<eda::PhaseTimings>& timings) {
  Table t;
  t.header = {"wall-clock seconds; not reproducible"};
  t.columns = {"k", "learn", "sample", "evaluate"};
  for (const auto& p : timings)
    t.rows.push_back({str(p.k), fixed(p.learn, 3), fixed(p.sample, 3), fixed(p.evaluate, 3)});
  return t;
}

}  // namespace eois::cli

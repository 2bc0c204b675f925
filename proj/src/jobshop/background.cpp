#include <algorithm>
#include <atomic>
#include <memory>

#include "eois/jobshop.hpp"

namespace eois::jobshop {

namespace {

struct Context {
  std::uint64_t id;
  DurationMatrix d;
  DurationFacts facts;
};

struct Evaluated {
  Schedule schedule;
  Timeline timeline;
};

// Literals of one clause are usually tested against the same schedule in a
// row, so each thread keeps the last simulation around.
const Evaluated& evaluate(const Context& ctx, kb::Value s) {
  thread_local std::uint64_t memo_ctx = 0;
  thread_local kb::Value memo_s = -1;
  thread_local Evaluated memo;
  if (memo_ctx != ctx.id || memo_s != s) {
    memo.schedule = Schedule::decode(static_cast<std::uint64_t>(s));
    memo.timeline = simulate(memo.schedule, ctx.d);
    memo_ctx = ctx.id;
    memo_s = s;
  }
  return memo;
}

std::uint64_t next_context_id() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

using Args = std::span<const std::optional<kb::Value>>;

kb::Value bound_schedule(Args a) {
  if (!a[0]) throw kb::ModeError("job-shop predicate evaluated with an unbound schedule");
  return *a[0];
}

/// Calls f(v) for the bound value of a 1-based job or machine argument, or
/// for each of 1..5 when it is open.  Stops when f returns false.
template <class F>
bool each_index(const std::optional<kb::Value>& arg, F&& f) {
  if (arg) return *arg < 1 || *arg > kJobs || f(static_cast<int>(*arg));
  for (int v = 1; v <= kJobs; ++v)
    if (!f(v)) return false;
  return true;
}

template <class F>
bool each_value(const std::optional<kb::Value>& arg, const std::vector<int>& grid, F&& f) {
  // Only the listed constants take part; any other value makes the atom false.
  if (arg) return !std::binary_search(grid.begin(), grid.end(), static_cast<int>(*arg)) || f(static_cast<int>(*arg));
  for (int v : grid)
    if (!f(v)) return false;
  return true;
}

class Builder {
 public:
  Builder(const DurationMatrix& d, const ThresholdGrid& grid)
      : ctx_(std::make_shared<const Context>(Context{next_context_id(), d, duration_facts(d)})), grid_(grid) {
    schedule_ = kb_.add_sort(kb::DomainSort::range("schedule", 0, static_cast<kb::Value>(kScheduleCount) - 1));
    job_ = kb_.add_sort(kb::DomainSort::range("job", 1, kJobs));
    machine_ = kb_.add_sort(kb::DomainSort::range("machine", 1, kMachines));
    wait_ = kb_.add_sort(kb::DomainSort::of("wait", merged(grid.wait)));
    total_ = kb_.add_sort(kb::DomainSort::of("total_wait", merged(std::array<std::vector<int>, 1>{grid.total_wait})));
    start_ = kb_.add_sort(kb::DomainSort::of("start", merged(grid.first_start)));
    kb_.set_target("good", {schedule_});
  }

  /// placement(S, J, M): job J sits at one of `positions` on machine M.
  void placement(const std::string& name, int lo, int hi) {
    auto ctx = ctx_;
    auto holds = [ctx, lo, hi](kb::Value s, int j, int m) {
      const int p = evaluate(*ctx, s).schedule.position(j - 1, m - 1);
      return p >= lo && p <= hi;
    };
    auto enumerate = [holds](Args a, kb::Emit emit) {
      const kb::Value s = bound_schedule(a);
      return each_index(a[2], [&](int m) {
        return each_index(a[1], [&](int j) {
          if (!holds(s, j, m)) return true;
          const kb::Value full[3] = {s, j, m};
          return emit(full);
        });
      });
    };
    const kb::PredId id = kb_.add_predicate(
        {name, {schedule_, job_, machine_}, {kb::Mode::In, kb::Mode::Out, kb::Mode::Out}},
        [holds](std::span<const kb::Value> a) { return holds(a[0], int(a[1]), int(a[2])); }, enumerate);
    kb_.add_mode(id, {kb::Mode::In, kb::Mode::Out, kb::Mode::Const});
  }

  /// A fixed property of a (job, machine) task that does not depend on the schedule.
  void task_fact(const std::string& name, bool (*fact)(const DurationFacts&, int job, int machine)) {
    auto ctx = ctx_;
    const kb::PredId id = kb_.add_predicate({name, {job_, machine_}, {kb::Mode::Out, kb::Mode::Out}},
                                            [ctx, fact](std::span<const kb::Value> a) {
                                              return fact(ctx->facts, int(a[0]) - 1, int(a[1]) - 1);
                                            });
    kb_.add_mode(id, {kb::Mode::In, kb::Mode::Const});
  }

  using MachineTime = int (*)(const Timeline&, int machine);

  using MachineGrid = std::array<std::vector<int>, kMachines>;

  /// name_le(S, M, T) and name_ge(S, M, T); T ranges over machine M's own grid.
  void machine_bound(const std::string& name, kb::SortId sort, const MachineGrid& grid, MachineTime f) {
    for (bool le : {true, false}) {
      auto ctx = ctx_;
      auto holds = [ctx, f, le, grid](kb::Value s, int m, int t) {
        const auto& g = grid[static_cast<std::size_t>(m - 1)];
        if (!std::binary_search(g.begin(), g.end(), t)) return false;
        const int v = f(evaluate(*ctx, s).timeline, m - 1);
        return le ? v <= t : v >= t;
      };
      auto enumerate = [holds, grid](Args a, kb::Emit emit) {
        const kb::Value s = bound_schedule(a);
        return each_index(a[1], [&](int m) {
          return each_value(a[2], grid[static_cast<std::size_t>(m - 1)], [&](int t) {
            if (!holds(s, m, t)) return true;
            const kb::Value full[3] = {s, m, t};
            return emit(full);
          });
        });
      };
      const kb::PredId id = kb_.add_predicate(
          {name + (le ? "_le" : "_ge"), {schedule_, machine_, sort}, {kb::Mode::In, kb::Mode::Out, kb::Mode::Out}},
          [holds](std::span<const kb::Value> a) { return holds(a[0], int(a[1]), int(a[2])); }, enumerate);
      kb_.add_mode(id, {kb::Mode::In, kb::Mode::Const, kb::Mode::Const});
    }
  }

  void total_wait_bound() {
    for (bool le : {true, false}) {
      auto ctx = ctx_;
      auto holds = [ctx, le](kb::Value s, int t) {
        const int v = evaluate(*ctx, s).timeline.total_idle;
        return le ? v <= t : v >= t;
      };
      auto enumerate = [holds, grid = grid_.total_wait](Args a, kb::Emit emit) {
        const kb::Value s = bound_schedule(a);
        return each_value(a[1], grid, [&](int t) {
          if (!holds(s, t)) return true;
          const kb::Value full[2] = {s, t};
          return emit(full);
        });
      };
      const kb::PredId id = kb_.add_predicate(
          {le ? "total_wait_le" : "total_wait_ge", {schedule_, total_}, {kb::Mode::In, kb::Mode::Out}},
          [holds](std::span<const kb::Value> a) { return holds(a[0], int(a[1])); }, enumerate);
      kb_.add_mode(id, {kb::Mode::In, kb::Mode::Const});
    }
  }

  kb::SortId wait_sort() const { return wait_; }
  kb::SortId start_sort() const { return start_; }
  kb::BackgroundKB take() { return std::move(kb_); }

 private:
  template <class Lists>
  static std::vector<kb::Value> merged(const Lists& lists) {
    std::vector<kb::Value> out;
    for (const auto& l : lists) out.insert(out.end(), l.begin(), l.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    // A sort needs at least one value even when no bound is usable.
    if (out.empty()) out.push_back(0);
    return out;
  }

  std::shared_ptr<const Context> ctx_;
  ThresholdGrid grid_;
  kb::BackgroundKB kb_;
  kb::SortId schedule_ = 0, job_ = 0, machine_ = 0, wait_ = 0, total_ = 0, start_ = 0;
};

}  // namespace

kb::BackgroundKB background_kb(const DurationMatrix& d, const ThresholdGrid& grid) {
  if (!d.valid()) throw std::invalid_argument("duration matrix entries must be >= 1");
  Builder b(d, grid);
  b.placement("early", 0, 1);
  b.placement("late", kJobs - 2, kJobs - 1);
  b.task_fact("fastest", [](const DurationFacts& f, int j, int m) { return f.fastest[m] == j; });
  b.task_fact("slowest", [](const DurationFacts& f, int j, int m) { return f.slowest[m] == j; });
  b.task_fact("fast", [](const DurationFacts& f, int j, int m) { return f.rank[j][m] <= 1; });
  b.task_fact("slow", [](const DurationFacts& f, int j, int m) { return f.rank[j][m] >= kJobs - 2; });
  b.machine_bound("wait", b.wait_sort(), grid.wait, [](const Timeline& t, int m) { return t.idle[m]; });
  b.total_wait_bound();
  b.machine_bound("first_start", b.start_sort(), grid.first_start,
                  [](const Timeline& t, int m) { return t.first_start[m]; });
  return b.take();
}

std::vector<std::string> background_jobshop(const Schedule& s, const kb::BackgroundKB& kb) {
  const kb::Value index = static_cast<kb::Value>(s.encode());
  const kb::SortId schedule = kb.predicate(kb.target()).sig.arg_sorts.at(0);
  std::vector<std::string> atoms;
  for (kb::PredId id = 0; id < kb.predicate_count(); ++id) {
    const kb::Predicate& p = kb.predicate(id);
    if (p.role != kb::PredicateRole::Background) continue;
    std::array<std::optional<kb::Value>, kb::kMaxArity> partial;
    if (p.sig.arg_sorts.front() == schedule) partial[0] = index;
    kb.solve_atom(id, std::span<const std::optional<kb::Value>>(partial.data(), p.sig.arity()),
                  [&](std::span<const kb::Value> full) {
                    kb::Literal lit{id, {}};
                    for (kb::Value v : full) lit.args.push_back(kb::Term::constant(v));
                    atoms.push_back(kb::to_text(lit, kb));
                    return true;
                  });
  }
  std::sort(atoms.begin(), atoms.end());
  return atoms;
}

}  // namespace eois::jobshop

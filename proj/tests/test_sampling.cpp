#include <cmath>
#include <set>

#include "doctest.h"
#include "eois/chess.hpp"
#include "eois/sampling.hpp"

using namespace eois;
using namespace eois::sampling;

namespace {

const chess::ChessProblem& krk() {
  static const chess::ChessProblem p(std::make_shared<const chess::Tablebase>(chess::Tablebase::build()),
                                     chess::Background::High);
  return p;
}

constexpr const char* kSmallClause =
    "good(A,B,C,D,E,F) :- wk_file(A), wk_rank(B), wr_file(C), wr_rank(D), bk_file(E), bk_rank(F), "
    "bk_corner_dist(E,F,0), dist_wk_bk(A,B,E,F,3), fdist_wr_bk(C,D,E,F,0).";

constexpr const char* kBroadClause =
    "good(A,B,C,D,E,F) :- bk_file(E), bk_rank(F), bk_edge_dist(E,F,0), wk_file(A), wk_rank(B), "
    "dist_wk_bk(A,B,E,F,2), wr_file(C), wr_rank(D).";

std::set<Instance> entailed_canonical(const kb::Theory& t) {
  std::set<Instance> out;
  for (const Instance& x : krk().space().all())
    if (kb::entails(t, x, krk().background())) out.insert(x);
  return out;
}

double fraction_at_most(const std::vector<Instance>& xs, Cost theta) {
  return estimate_success_probability(xs, theta, krk().objective());
}

}  // namespace

TEST_CASE("config validation") {
  SamplerConfig c;
  CHECK(c.validate().empty());
  c.n = 0;
  c.delta = 0.0;
  CHECK(c.validate().size() >= 2);
  SamplerConfig d;
  d.max_rejection_attempts = 10;
  d.n = 20;
  CHECK_FALSE(d.validate().empty());
}

TEST_CASE("empty theory: n distinct uniform positions") {
  SamplerConfig cfg;
  cfg.rng_seed = 4;
  const SampleResult r = sample(cfg, {}, krk().background(), krk().space());
  CHECK(r.uniform);
  REQUIRE(r.instances.size() == 1000);
  CHECK(std::set<Instance>(r.instances.begin(), r.instances.end()).size() == 1000);
  CHECK(std::abs(fraction_at_most(r.instances, 8) - 0.136) <= 0.03);
}

TEST_CASE("uniform draws match the class distribution (chi-square on cost classes)") {
  Rng rng(99);
  const auto& counts = krk().counts();
  std::array<double, chess::kDraw + 1> observed{};
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) ++observed[static_cast<std::size_t>(krk().objective().cost(krk().space().random(rng)))];
  double chi2 = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const double expected = draws * double(counts[c]) / 28056.0;
    chi2 += (observed[c] - expected) * (observed[c] - expected) / expected;
  }
  // 17 degrees of freedom; 40.8 is the 0.001 upper quantile.
  CHECK(chi2 < 40.8);
}

TEST_CASE("a clause with 27 canonical positions in its success set yields exactly those") {
  const kb::Theory t{{kb::parse_clause(kSmallClause, krk().background())}};
  const auto expected = entailed_canonical(t);
  REQUIRE(expected.size() == 27);
  SamplerConfig cfg;
  const SampleResult r = sample(cfg, t, krk().background(), krk().space());
  CHECK(r.instances.size() == 27);
  CHECK(std::set<Instance>(r.instances.begin(), r.instances.end()) == expected);
}

TEST_CASE("enumerate mode with delta 1 returns a prefix of the success set order") {
  const kb::Theory t{{kb::parse_clause(kBroadClause, krk().background()),
                      kb::parse_clause(kSmallClause, krk().background())}};
  SamplerConfig cfg;
  cfg.n = 100000;
  const SampleResult all = sample(cfg, t, krk().background(), krk().space());
  CHECK(std::set<Instance>(all.instances.begin(), all.instances.end()) == entailed_canonical(t));
  cfg.n = 50;
  const SampleResult head = sample(cfg, t, krk().background(), krk().space());
  REQUIRE(head.instances.size() == 50);
  CHECK(std::equal(head.instances.begin(), head.instances.end(), all.instances.begin()));
}

TEST_CASE("rejection mode: entailed, distinct, deterministic") {
  const kb::Theory t{{kb::parse_clause(kBroadClause, krk().background())}};
  SamplerConfig cfg;
  cfg.mode = Mode::Rejection;
  cfg.n = 200;
  cfg.rng_seed = 17;
  const SampleResult a = sample(cfg, t, krk().background(), krk().space());
  CHECK_FALSE(a.uniform);
  CHECK(std::set<Instance>(a.instances.begin(), a.instances.end()).size() == a.instances.size());
  for (const Instance& x : a.instances) CHECK(kb::entails(t, x, krk().background()));
  cfg.threads = 3;
  const SampleResult b = sample(cfg, t, krk().background(), krk().space());
  CHECK(a.instances == b.instances);
  CHECK(a.attempts == b.attempts);
}

TEST_CASE("rejection mode reports exhaustion") {
  const kb::Theory t{{kb::parse_clause(kSmallClause, krk().background())}};
  SamplerConfig cfg;
  cfg.mode = Mode::Rejection;
  cfg.n = 100;
  cfg.rng_seed = 2;
  const SampleResult r = sample(cfg, t, krk().background(), krk().space());
  CHECK(r.exhausted);
  CHECK(r.attempts == cfg.attempt_limit());
  CHECK(r.instances.size() < 100);
}

TEST_CASE("accepted count grows with delta in expectation") {
  const kb::Theory t{{kb::parse_clause(kBroadClause, krk().background())}};
  std::vector<double> means;
  for (double delta : {0.25, 0.5, 0.75, 1.0}) {
    double total = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      SamplerConfig cfg;
      cfg.mode = Mode::Rejection;
      cfg.n = 400;
      cfg.max_rejection_attempts = 400;
      cfg.delta = delta;
      cfg.rng_seed = seed;
      total += double(sample(cfg, t, krk().background(), krk().space()).instances.size());
    }
    means.push_back(total / 30.0);
  }
  for (std::size_t i = 1; i < means.size(); ++i) CHECK(means[i] >= means[i - 1]);
}

TEST_CASE("success probability estimates") {
  const std::vector<Cost> low{0, 1, 2, 3};
  CHECK(estimate_success_probability(low, 3) == 1.0);
  std::vector<Cost> mixed(1000, 20);
  std::fill(mixed.begin(), mixed.begin() + 818, 5);
  CHECK(estimate_success_probability(mixed, 8) == doctest::Approx(0.818));
  CHECK_THROWS_AS(estimate_success_probability(std::span<const Cost>{}, 8), EmptySampleError);

  // Uniform sample at theta = 0: expected 27/28056 per draw.
  Rng rng(12);
  const auto xs = uniform_sample(1000, krk().space(), rng);
  const double p = 27.0 / 28056.0;
  const double sigma = std::sqrt(p * (1 - p) / 1000.0);
  CHECK(std::abs(fraction_at_most(xs, 0) - p) <= 3 * sigma);
}

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <set>

#include "qcland/brute_force.hpp"
#include "qcland/combinatorics.hpp"
#include "qcland/complexity.hpp"
#include "qcland/stochastic_descent.hpp"
#include "support/oracles.hpp"

using namespace qcland;

namespace {

ControlProblem chain(int l, double t, int nt) {
  ControlProblem p;
  p.n_sites = l;
  p.duration = t;
  p.n_bangs = nt;
  return p;
}

}  // namespace

TEST_SUITE("stochastic_descent") {

TEST_CASE("update enumeration counts match the binomial sum") {
  CHECK(enumerate_updates(5, 1).size() == 5);
  CHECK(enumerate_updates(5, 2).size() == 15);

  std::uint64_t expected = 0;
  for (int i = 1; i <= 4; ++i) expected += binomial(80, i);
  CHECK(expected == 1666980);  // C(80,4)+C(80,3)+C(80,2)+C(80,1)
  CHECK(enumerate_updates(80, 4).size() == expected);
}

TEST_CASE("updates are distinct and within range") {
  const auto updates = enumerate_updates(7, 3);
  std::set<std::uint64_t> masks;
  for (const auto& u : updates) {
    std::uint64_t m = 0;
    for (auto p : u.view()) {
      CHECK(p < 7);
      m |= std::uint64_t{1} << p;
    }
    CHECK(std::popcount(m) == u.size);
    masks.insert(m);
  }
  CHECK(masks.size() == updates.size());
}

TEST_CASE("flip order outside [1, N_T] is rejected") {
  CHECK_THROWS_AS(enumerate_updates(5, 6), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_updates(5, 0), std::invalid_argument);
}

TEST_CASE("single-bang landscape returns the better of the two protocols") {
  FidelityEvaluator eval(chain(3, 0.5, 1));
  const double f_plus = eval.fidelity({1});
  const double f_minus = eval.fidelity({-1});
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const LocalMinimum m = sd_run(eval, 1, seed);
    CHECK(m.accepted_moves <= 1);
    CHECK(m.fidelity == std::max(f_plus, f_minus));
  }
}

TEST_CASE("below the two-flip transition every chain lands on the same protocol") {
  ControlProblem p = chain(6, 0.5, 50);
  p.convention = SpinConvention::spin_half;
  FidelityEvaluator eval(p);
  const LocalMinimum first = sd_run(eval, 2, 1000);
  for (std::uint64_t seed = 1001; seed < 1100; ++seed)
    CHECK(sd_run(eval, 2, seed).protocol == first.protocol);
}

TEST_CASE("short-duration one-flip minima sit behind width-two barriers") {
  // a staircase of near-degenerate SD_1 minima around the optimal step
  // protocol; none of them survives two-flip moves
  ControlProblem p = chain(6, 0.2, 50);
  p.convention = SpinConvention::spin_half;
  FidelityEvaluator eval(p);
  const LocalMinimum reference = sd_run(eval, 2, 55);
  int nontrivial = 0;
  for (std::uint64_t seed = 300; seed < 320; ++seed) {
    const LocalMinimum m = sd_run(eval, 1, seed);
    CHECK(certify_local_minimum(eval, m.protocol, 1));
    if (m.protocol != reference.protocol) {
      ++nontrivial;
      CHECK_FALSE(certify_local_minimum(eval, m.protocol, 2));
    }
  }
  CHECK(nontrivial > 0);
  CHECK(certify_local_minimum(eval, reference.protocol, 2));
}

TEST_CASE("one-flip minima survive an exhaustive neighbour check") {
  FidelityEvaluator eval(chain(4, 1.0, 10));
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    const LocalMinimum m = sd_run(eval, 1, seed);
    for (int j = 0; j < 10; ++j) {
      Protocol neighbour = m.protocol;
      neighbour[j] = static_cast<std::int8_t>(-neighbour[j]);
      CHECK(eval.fidelity(neighbour) <= m.fidelity);
    }
  }
}

TEST_CASE("accepted costs decrease strictly") {
  FidelityEvaluator eval(chain(5, 2.0, 20));
  DescentTrace trace;
  const LocalMinimum m = sd_run(eval, 2, 99, &trace);
  REQUIRE(trace.accepted_costs.size() == m.accepted_moves + 1);
  for (std::size_t i = 1; i < trace.accepted_costs.size(); ++i)
    CHECK(trace.accepted_costs[i] < trace.accepted_costs[i - 1]);
}

TEST_CASE("evaluation count covers the final failed sweep") {
  FidelityEvaluator eval(chain(5, 2.0, 12));
  const std::uint64_t sweep = enumerate_updates(12, 2).size();
  for (std::uint64_t seed = 40; seed < 44; ++seed) {
    const LocalMinimum m = sd_run(eval, 2, seed);
    CHECK(m.n_eval >= sweep + 1);                      // initial draw + failed sweep
    CHECK(m.n_eval >= sweep + m.accepted_moves + 1);   // each acceptance examined >= 1
  }
}

TEST_CASE("sd_run outputs certify as local minima") {
  FidelityEvaluator eval(chain(6, 2.5, 20));
  for (std::uint64_t seed = 7; seed < 12; ++seed) {
    const LocalMinimum m = sd_run(eval, 2, seed);
    CHECK(certify_local_minimum(eval, m.protocol, 2));
  }
}

TEST_CASE("global optimum certifies at any flip order, a perturbed one does not") {
  FidelityEvaluator eval(chain(4, 1.5, 10));
  const BruteForceResult opt = brute_force_optimum(eval);
  CHECK(certify_local_minimum(eval, opt.best, 1));
  CHECK(certify_local_minimum(eval, opt.best, 2));
  CHECK(certify_local_minimum(eval, opt.best, 3));
  Protocol nudged = opt.best;
  nudged[3] = static_cast<std::int8_t>(-nudged[3]);
  CHECK_FALSE(certify_local_minimum(eval, nudged, 1));
}

TEST_CASE("sampling is reproducible and worker-count independent") {
  FidelityEvaluator eval(chain(5, 1.2, 14));
  const SampleSet serial = sample(eval, 2, 24, 777, 1);
  const SampleSet parallel = sample(eval, 2, 24, 777, 3);
  REQUIRE(serial.records.size() == parallel.records.size());
  for (std::size_t i = 0; i < serial.records.size(); ++i) {
    CHECK(serial.records[i].protocol == parallel.records[i].protocol);
    CHECK(serial.records[i].fidelity == parallel.records[i].fidelity);
    CHECK(serial.records[i].n_eval == parallel.records[i].n_eval);
    CHECK(serial.records[i].seed == parallel.records[i].seed);
  }
}

TEST_CASE("single-sample set has one distinct protocol") {
  FidelityEvaluator eval(chain(4, 1.0, 8));
  CHECK(sample(eval, 1, 1, 5).distinct_count() == 1);
}

TEST_CASE("convex regime collapses to one distinct minimum for any M") {
  ControlProblem p = chain(6, 0.5, 50);
  p.convention = SpinConvention::spin_half;
  FidelityEvaluator eval(p);
  const SampleSet set = sample(eval, 2, 50, 2024);
  CHECK(set.distinct_count() == 1);
}

TEST_CASE("glassy regime keeps most minima distinct") {
  ControlProblem p = chain(6, 3.2, 50);
  p.convention = SpinConvention::spin_half;
  FidelityEvaluator eval(p);
  const SampleSet set = sample(eval, 2, 500, 31415);
  CHECK(static_cast<double>(set.distinct_count()) / set.size() >= 0.8);
}

TEST_CASE("enumeration beats a thousand random protocols") {
  FidelityEvaluator eval(chain(4, 2.0, 16));
  const BruteForceResult opt = brute_force_optimum(eval);
  Rng rng(123);
  for (int rep = 0; rep < 1000; ++rep)
    CHECK(opt.best_cost <= eval.cost(random_protocol(16, rng)) + 1e-15);
}

TEST_CASE("single-bang enumeration picks the better protocol") {
  FidelityEvaluator eval(chain(3, 0.5, 1));
  const BruteForceResult opt = brute_force_optimum(eval);
  // the half-product path associates the chain differently: 1e-12, not ==
  CHECK(opt.best_fidelity ==
        doctest::Approx(std::max(eval.fidelity({1}), eval.fidelity({-1})))
            .epsilon(1e-12));
}

TEST_CASE("meet-in-the-middle table matches plain per-protocol evolution") {
  FidelityEvaluator eval(chain(6, 1.0, 12));
  const BruteForceResult opt = brute_force_optimum(eval, /*keep_table=*/true);
  const std::vector<double> naive = oracles::naive_cost_table(eval);
  REQUIRE(opt.cost_table.size() == naive.size());
  double max_diff = 0.0;
  for (std::size_t s = 0; s < naive.size(); ++s)
    max_diff = std::max(max_diff, std::abs(opt.cost_table[s] - naive[s]));
  CHECK(max_diff < 1e-12);
  const auto lowest = std::min_element(opt.cost_table.begin(), opt.cost_table.end());
  CHECK(opt.best_cost == *lowest);
  CHECK(opt.best_index == static_cast<std::uint64_t>(lowest - opt.cost_table.begin()));
}

TEST_CASE("enumeration above the cap is rejected with a resource error") {
  FidelityEvaluator eval(chain(4, 1.0, 26));
  CHECK_THROWS_WITH_AS(brute_force_optimum(eval), doctest::Contains("cap"),
                       std::runtime_error);
}

TEST_CASE("convex-regime complexity equals the mean evaluation count") {
  ControlProblem p = chain(6, 0.3, 14);
  p.convention = SpinConvention::spin_half;
  FidelityEvaluator eval(p);
  const BruteForceResult opt = brute_force_optimum(eval);
  const ComplexityEstimate est = estimate_complexity(eval, 2, 200, 42, opt);
  CHECK(est.p_opt == 1.0);
  CHECK(est.complexity == est.mean_n_eval);
  CHECK_FALSE(est.censored);
  CHECK(est.complexity >= est.mean_n_eval);
}

TEST_CASE("glassy-regime complexity dwarfs the convex one") {
  const int runs = 2000;
  ControlProblem fast = chain(6, 0.3, 14);
  fast.convention = SpinConvention::spin_half;
  ControlProblem slow = chain(6, 3.0, 14);
  slow.convention = SpinConvention::spin_half;
  FidelityEvaluator convex(fast);
  const ComplexityEstimate easy =
      estimate_complexity(convex, 1, runs, 7, brute_force_optimum(convex));
  FidelityEvaluator glassy(slow);
  const ComplexityEstimate hard =
      estimate_complexity(glassy, 1, runs, 7, brute_force_optimum(glassy));
  CHECK(hard.complexity >= 10.0 * easy.complexity);
}

TEST_CASE("an unreachable optimum yields a censored estimate") {
  FidelityEvaluator eval(chain(4, 1.0, 8));
  BruteForceResult fake;
  fake.n_bangs = 8;
  fake.best = Protocol(9, 1);   // length mismatch: no run can ever match it
  fake.best_cost = -1.0;        // nor sit within 1e-12 of this cost
  const ComplexityEstimate est = estimate_complexity(eval, 1, 50, 3, fake);
  CHECK(est.censored);
  CHECK(est.n_hits == 0);
  CHECK(est.p_opt == doctest::Approx(1.0 / 50));
  CHECK(est.complexity == doctest::Approx(est.mean_n_eval * 50));
}

}  // TEST_SUITE

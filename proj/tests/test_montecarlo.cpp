#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "substoch/generators.hpp"
#include "substoch/montecarlo.hpp"

using namespace substoch;
using oracle::q;

TEST_CASE("zero matrix absorbs immediately", "[montecarlo]")
{
    const auto sp = validate_substochastic(Matrix<Rational>::zero(3));
    for (Index s = 1; s <= 3; ++s) {
        const auto w = simulate_visits(sp, s, 1000, 17);
        for (Index j = 1; j <= 3; ++j) {
            CHECK(w.mean_visits[j - 1] == (j == s ? 1.0 : 0.0));
            CHECK(w.ci_halfwidth[j - 1] == 0.0);
        }
        CHECK(w.cap_exceeded == 0);
    }
    CHECK(crosscheck_fundamental(sp, 100, 1).passed());
}

TEST_CASE("two-state chain matches the fundamental matrix", "[montecarlo]")
{
    const auto sp = validate_substochastic(Matrix<Rational>{{q(1, 2), q(1, 4)}, {q(1, 3), q(1, 3)}});
    const auto w = simulate_visits(sp, 1, 100000, 2024);
    CHECK(w.trials == 100000);
    CHECK(w.seed == 2024);
    CHECK(std::fabs(w.mean_visits[0] - 8.0 / 3.0) <= 3 * w.ci_halfwidth[0]);
    CHECK(std::fabs(w.mean_visits[1] - 1.0) <= 3 * w.ci_halfwidth[1]);
    CHECK(w.mean_visits[0] >= 1.0);
    CHECK(w.ci_halfwidth[0] > 0.0);
}

TEST_CASE("same seed gives identical statistics", "[montecarlo]")
{
    const auto sp = validate_substochastic(Matrix<Rational>{{q(1, 2), q(1, 4)}, {q(1, 3), q(1, 3)}});
    const auto a = simulate_visits(sp, 2, 5000, 7);
    const auto b = simulate_visits(sp, 2, 5000, 7);
    CHECK(a.mean_visits == b.mean_visits);
    CHECK(a.ci_halfwidth == b.ci_halfwidth);
    const auto c = simulate_visits(sp, 2, 5000, 8);
    CHECK(a.mean_visits != c.mean_visits);
    // exact and float inputs give the same walks
    const auto f = simulate_visits(validate_substochastic(convert<double>(sp.matrix())), 2, 5000, 7);
    CHECK(f.mean_visits == a.mean_visits);
}

TEST_CASE("crosscheck on the half swap", "[montecarlo]")
{
    const auto sp = validate_substochastic(Matrix<Rational>{{q(0), q(1, 2)}, {q(1, 2), q(0)}});
    const auto c = crosscheck_fundamental(sp, 100000, 11, 4.0);
    CHECK(c.passed());
    CHECK(c.flags.empty());
    CHECK(c.dominance_violations.empty());
    CHECK(c.exact(1, 1) == Catch::Approx(4.0 / 3.0));
    CHECK(c.exact(1, 2) == Catch::Approx(2.0 / 3.0));
    REQUIRE(c.rows.size() == 2);
}

TEST_CASE("walks through rows summing to one", "[montecarlo]")
{
    // state 1 never absorbs; (I - P)^{-1} = [[2, 2], [1, 2]]
    const auto sp = validate_substochastic(Matrix<Rational>{{q(0), q(1)}, {q(1, 2), q(0)}});
    CHECK(fundamental_matrix(sp, false) == Matrix<Rational>{{q(2), q(2)}, {q(1), q(2)}});
    const auto c = crosscheck_fundamental(sp, 50000, 5);
    CHECK(c.passed());
    const auto w = simulate_visits(sp, 1, 1000, 3);
    // from state 1 the walk always reaches state 2 at least once
    CHECK(w.mean_visits[1] >= 1.0);
}

TEST_CASE("simulate_visits argument errors", "[montecarlo]")
{
    const auto sp = validate_substochastic(Matrix<Rational>::zero(2));
    CHECK_THROWS_AS(simulate_visits(sp, 0, 10, 1), Error);
    CHECK_THROWS_AS(simulate_visits(sp, 3, 10, 1), Error);
    CHECK_THROWS_AS(simulate_visits(sp, 1, 0, 1), Error);
}

TEST_CASE("random chains rarely flag", "[montecarlo][property]")
{
    std::size_t flags = 0;
    std::size_t entries = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        GenSpec s;
        s.n = 3 + seed % 3;
        s.seed = seed + 70;
        s.max_row_sum = q(9, 10);
        const auto c = crosscheck_fundamental(gen_substochastic(s), 20000, seed);
        flags += c.flags.size();
        entries += s.n * s.n;
    }
    CHECK(flags <= 1);
    CHECK(entries > 0);
}

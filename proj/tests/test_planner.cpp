#include <cmath>
#include <cstdint>

#include <doctest.h>

#include "gert/planner.hpp"
#include "oracles.hpp"

using namespace gert;

namespace {
constexpr double kLn2 = 0.69314718055994530942;
const AccuracySpec kSpec{0.95, 0.05};
}  // namespace

TEST_CASE("frame condition constants") {
    CHECK(k1(kLn2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k2(kLn2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k(kLn2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k1(0.84) == doctest::Approx(0.75966658055).epsilon(1e-10));
    CHECK(k2(0.84) == doctest::Approx(1.31636697678).epsilon(1e-10));
    CHECK(k(0.84) == k2(0.84));
    CHECK(k1(0.3) == doctest::Approx(2.85829591351).epsilon(1e-10));
    CHECK(k(0.3) == k1(0.3));
    CHECK(k1(20.0) == doctest::Approx(2.06115362669e-9).epsilon(1e-9));
    CHECK(k2(1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));

    SUBCASE("reciprocal pair over a dense grid") {
        for (int i = 1; i <= 10000; ++i) {
            const double r = 5.0 * i / 10000.0;
            CHECK(std::fabs(k1(r) * k2(r) - 1.0) <= 1e-12);
            CHECK(k(r) >= 1.0 - 1e-12);
        }
    }
    SUBCASE("domain") {
        CHECK_THROWS_AS(k1(0.0), DomainError);
        CHECK_THROWS_AS(k2(-1.0), DomainError);
        CHECK_THROWS_AS(k(0.0), DomainError);
    }
}

TEST_CASE("epsilon budget and per-frame epsilon") {
    CHECK(epsilon_max(kSpec) == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(epsilon_max(AccuracySpec{0.0, 0.05}) == 1.0);
    CHECK(epsilon_max(AccuracySpec{0.99, 0.05}) == doctest::Approx(0.01).epsilon(1e-12));

    CHECK(epsilon_for(200, 0.84) == doctest::Approx(0.0811285084536).epsilon(1e-10));
    CHECK(epsilon_for(1000, 0.84) == doctest::Approx(0.0362817719631).epsilon(1e-10));
    CHECK(epsilon_for(400, kLn2) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(1.0 - epsilon_for(200, 0.84) == doctest::Approx(0.918871491546).epsilon(1e-10));
    CHECK_THROWS_AS(epsilon_for(0, 0.5), DomainError);
}

TEST_CASE("frame size bounds") {
    SUBCASE("reference load") {
        const auto b = f_bounds(0.84, 1200, kSpec);
        CHECK(b.f_max == 1428);
        CHECK(b.f_min == 527);
    }
    SUBCASE("crossover load") {
        const auto b = f_bounds(kLn2, 1000, kSpec);
        CHECK(b.f_min == 400);
        CHECK(b.f_max == 1442);
    }
    SUBCASE("overload is infeasible") {
        CHECK_THROWS_AS(f_bounds(2.0, 1200, kSpec), InfeasibleError);
    }
}

TEST_CASE("persistence from load") {
    CHECK(persistence_for(1000, 0.84, 1200) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(persistence_for(500, 0.5, 1000) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(persistence_for(2000, 0.5, 1000) == 1.0);  // exactly f_max
    CHECK_THROWS_AS(persistence_for(4000, 0.5, 1000), DomainError);
    CHECK_THROWS_AS(persistence_for(100, -0.1, 1000), DomainError);
}

TEST_CASE("rounds required") {
    SUBCASE("worked point") {
        const auto rb = rounds_breakdown(1000, 0.7, 1200, kSpec, 0.0363);
        CHECK(rb.z_star == doctest::Approx(2.46503465616).epsilon(1e-9));
        CHECK(rb.n_left == doctest::Approx(4.34644791978).epsilon(1e-8));
        CHECK(rb.n_right == doctest::Approx(4.7274613932).epsilon(1e-8));
        CHECK(rb.n == 5);
        CHECK(rounds_required(1000, 0.7, 1200, kSpec, 0.0363) == 5);
    }
    SUBCASE("scaling in the variance") {
        double nl1 = 0.0, nr1 = 0.0, nl2 = 0.0, nr2 = 0.0;
        rounds_from_moments(2.0, 3e-4, 0.02, -0.03, nl1, nr1);
        rounds_from_moments(2.0, 6e-4, 0.02, -0.03, nl2, nr2);
        CHECK(nl2 == doctest::Approx(2.0 * nl1).epsilon(1e-14));
        CHECK(nr2 == doctest::Approx(2.0 * nr1).epsilon(1e-14));
    }
    SUBCASE("degenerate band rejected") {
        CHECK_THROWS_AS(rounds_required(1000, 0.7, 1200, AccuracySpec{0.95, 0.0}, 0.01),
                        DomainError);
        CHECK_THROWS_AS(rounds_required(1000, 0.7, 1200, kSpec, 0.05), InfeasibleError);
        CHECK_THROWS_AS(rounds_required(1000, 0.7, 1200, kSpec, -0.01), DomainError);
    }
    SUBCASE("non-increasing in the frame size along fixed load") {
        const double r = 0.84;
        std::int64_t prev_n = -1;
        for (std::int64_t f = 527; f <= 1428; f += 17) {
            const double p = persistence_for(f, r, 1200);
            const auto n = rounds_required(f, p, 1200, kSpec, epsilon_for(f, r));
            if (prev_n >= 0) CHECK(n <= prev_n);
            prev_n = n;
        }
    }
}

TEST_CASE("largest feasible load") {
    const double rm = r_max(1200, kSpec);
    CHECK(rm == doctest::Approx(1.23329258685).epsilon(1e-5));
    CHECK(std::fabs(rm - oracles::dense_r_max(1200, kSpec)) <= 2e-4);
    CHECK(r_max(2400, kSpec) > rm);
    CHECK(r_max(278, kSpec) > 0.0);
    CHECK_THROWS_AS(r_max(277, kSpec), InfeasibleError);

    SUBCASE("oracle agreement across bounds") {
        for (const std::int64_t tm : {300LL, 1000LL, 5296LL, 21182LL}) {
            CHECK(std::fabs(r_max(tm, kSpec) - oracles::dense_r_max(tm, kSpec)) <= 2e-4);
        }
    }
    SUBCASE("tighter alpha shrinks the load ceiling") {
        CHECK(r_max(120000, AccuracySpec{0.99, 0.05}) < r_max(120000, AccuracySpec{0.95, 0.05}));
    }
}

namespace {

void check_plan_invariants(const FramePlan& fp, const AccuracySpec& spec, PlanMode mode,
                           const PlannerConfig& cfg) {
    CHECK(fp.n >= 1);
    CHECK(fp.p > 0.0);
    CHECK(fp.p <= 1.0);
    CHECK(spec.alpha + fp.epsilon < 1.0);
    // r realizes t_m * p / f
    CHECK(std::fabs(fp.r - static_cast<double>(fp.t_m) * fp.p / static_cast<double>(fp.f)) <=
          1e-9 * fp.r);
    if (mode == PlanMode::Gert) {
        CHECK(fp.epsilon * fp.epsilon * static_cast<double>(fp.f) >= k(fp.r) - 1e-12);
        const auto b = f_bounds(fp.r, fp.t_m, spec);
        CHECK(fp.f >= b.f_min);
        CHECK(fp.f <= b.f_max);
    } else {
        CHECK(fp.epsilon == 0.0);
        CHECK(fp.f >= 1);
    }
    // plan state recomputes through the public operations
    CHECK(fp.n == rounds_required(fp.f, fp.p, fp.t_m, spec, fp.epsilon));
    CHECK(fp.cost ==
          (static_cast<double>(fp.f) + cfg.inter_frame_gap_slots) * static_cast<double>(fp.n));
}

}  // namespace

TEST_CASE("plan search") {
    const PlannerConfig cfg;

    SUBCASE("worked bound beats the fixed reference candidate") {
        const FramePlan fp = plan(1200, kSpec);
        check_plan_invariants(fp, kSpec, PlanMode::Gert, cfg);
        CHECK(fp.cost <= 5016.65);
        CHECK(fp.epsilon <= 0.05);
    }

    SUBCASE("matches the serial reference everywhere sampled") {
        for (const std::int64_t tm : {278LL, 292LL, 331LL, 1200LL, 5296LL, 21182LL}) {
            const FramePlan a = plan(tm, kSpec);
            const FramePlan b = plan_serial(tm, kSpec);
            CHECK(a.r == b.r);
            CHECK(a.f == b.f);
            CHECK(a.p == b.p);
            CHECK(a.n == b.n);
            CHECK(a.epsilon == b.epsilon);
            CHECK(a.cost == b.cost);
            check_plan_invariants(a, kSpec, PlanMode::Gert, cfg);
        }
        for (const std::int64_t tm : {1LL, 6LL, 1200LL, 21182LL}) {
            const FramePlan a = plan(tm, kSpec, cfg, PlanMode::Waec);
            const FramePlan b = plan_serial(tm, kSpec, cfg, PlanMode::Waec);
            CHECK(a.r == b.r);
            CHECK(a.f == b.f);
            CHECK(a.n == b.n);
            CHECK(a.cost == b.cost);
            check_plan_invariants(a, kSpec, PlanMode::Waec, cfg);
        }
    }

    SUBCASE("repeat runs are identical") {
        const FramePlan a = plan(5296, kSpec);
        const FramePlan b = plan(5296, kSpec);
        CHECK(a.r == b.r);
        CHECK(a.f == b.f);
        CHECK(a.n == b.n);
        CHECK(a.cost == b.cost);
    }

    SUBCASE("refining the frame grid never worsens the cost") {
        PlannerConfig fine = cfg;
        fine.f_grid_max_points = 512;
        for (const std::int64_t tm : {1200LL, 5296LL, 21182LL}) {
            CHECK(plan(tm, kSpec, fine).cost <= plan(tm, kSpec, cfg).cost);
            CHECK(plan(tm, kSpec, fine, PlanMode::Waec).cost <=
                  plan(tm, kSpec, cfg, PlanMode::Waec).cost);
        }
    }

    SUBCASE("dropping the approximation allowance can only cheapen the plan") {
        for (const std::int64_t tm : {300LL, 1200LL, 21182LL}) {
            CHECK(plan(tm, kSpec, cfg, PlanMode::Waec).cost <= plan(tm, kSpec, cfg).cost);
        }
    }

    SUBCASE("infeasible bounds") {
        CHECK_THROWS_AS(plan(200, kSpec), InfeasibleError);
        CHECK_THROWS_AS(plan(1, kSpec), InfeasibleError);
    }

    SUBCASE("tiny bound still plans without the allowance") {
        const FramePlan fp = plan(1, kSpec, cfg, PlanMode::Waec);
        check_plan_invariants(fp, kSpec, PlanMode::Waec, cfg);
    }
}

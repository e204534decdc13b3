#include <cmath>
#include <cstdint>
#include <limits>

#include <doctest.h>

#include "gert/estimator.hpp"
#include "gert/rng.hpp"

using namespace gert;

namespace {

FrameObservation frame_with_busy(std::int64_t f, std::int64_t busy) {
    FrameObservation obs;
    obs.bits.assign(static_cast<std::size_t>(f), 0);
    for (std::int64_t i = 0; i < busy; ++i) obs.bits[static_cast<std::size_t>(i)] = 1;
    obs.n_nonempty = busy;
    obs.n_zero = f - busy;
    obs.z = static_cast<double>(obs.n_nonempty - obs.n_zero) / static_cast<double>(f);
    return obs;
}

}  // namespace

TEST_CASE("slot probabilities") {
    const ChannelParams ch{1000, 0.7};

    SUBCASE("empty population") {
        const auto sp = slot_probs(0.0, ch);
        CHECK(sp.p0 == 1.0);
        CHECK(sp.pn == 0.0);
    }
    SUBCASE("reference point") {
        const auto sp = slot_probs(1200.0, ch);
        CHECK(sp.p0 == doctest::Approx(0.431583559947).epsilon(1e-10));
        CHECK(sp.p0 + sp.pn == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("single always-on tag in a single slot") {
        const auto sp = slot_probs(1.0, ChannelParams{1, 1.0});
        CHECK(sp.p0 == 0.0);
        CHECK(sp.pn == 1.0);
    }
    SUBCASE("domain") {
        CHECK_THROWS_AS(slot_probs(-1.0, ch), DomainError);
        CHECK_THROWS_AS(slot_probs(5.0, ChannelParams{0, 0.5}), DomainError);
        CHECK_THROWS_AS(slot_probs(5.0, ChannelParams{10, 0.0}), DomainError);
        CHECK_THROWS_AS(slot_probs(5.0, ChannelParams{10, 1.5}), DomainError);
    }
}

TEST_CASE("response curve g") {
    const ChannelParams ch{1000, 0.7};
    CHECK(g(0.0, ch) == -1.0);
    CHECK(g(1200.0, ch) == doctest::Approx(0.136832880107).epsilon(1e-10));
    CHECK(g(1140.0, ch) == doctest::Approx(0.0997945373225).epsilon(1e-10));
    CHECK(g(1260.0, ch) == doctest::Approx(0.172347305415).epsilon(1e-10));
    CHECK(g(1140.0, ch) < g(1260.0, ch));

    SUBCASE("strictly increasing on random pairs") {
        Rng rng = Rng::stream(7, 0, 0);
        for (int i = 0; i < 300; ++i) {
            const ChannelParams c{static_cast<std::int64_t>(2 + rng.next_below(5000)),
                                  0.05 + 0.95 * rng.next_unit()};
            const double t1 = rng.next_unit() * 10.0 * c.f / c.p;
            const double t2 = t1 + 0.5 + rng.next_unit() * c.f;
            CHECK(g(t1, c) < g(t2, c));
        }
    }

    SUBCASE("exponential approximation regime") {
        // for p/f <= 1e-3 the simple exponential law stays within 1e-3 of g
        Rng rng = Rng::stream(8, 0, 0);
        for (int i = 0; i < 300; ++i) {
            const auto f = static_cast<std::int64_t>(1000 + rng.next_below(20000));
            const double p = rng.next_unit() * std::min(1.0, 1e-3 * static_cast<double>(f));
            if (p <= 0.0) continue;
            const ChannelParams c{f, p};
            const double t = rng.next_unit() * 2.0 * static_cast<double>(f) / p;
            const double approx = 1.0 - 2.0 * std::exp(-t * p / static_cast<double>(f));
            CHECK(std::fabs(g(t, c) - approx) <= 1e-3);
        }
    }
}

TEST_CASE("inverse of the response curve") {
    const ChannelParams ch{1000, 0.7};
    CHECK(g_inverse(-1.0, ch) == 0.0);
    CHECK(g_inverse(0.136832880107, ch) == doctest::Approx(1200.0).epsilon(1e-9));
    CHECK_THROWS_AS(g_inverse(1.0, ch), SaturatedError);
    CHECK_THROWS_AS(g_inverse(-1.5, ch), DomainError);
    CHECK_THROWS_AS(g_inverse(1.5, ch), DomainError);

    SUBCASE("round trip across the operating range") {
        Rng rng = Rng::stream(9, 0, 0);
        for (int i = 0; i < 1000; ++i) {
            const auto f = static_cast<std::int64_t>(2 + rng.next_below(5000));
            const double p = 0.05 + 0.95 * rng.next_unit();
            const ChannelParams c{f, p};
            // load factor t*p/f in (0, 1.2]
            const double r = 1e-3 + (1.2 - 1e-3) * rng.next_unit();
            const double t = r * static_cast<double>(f) / p;
            const double back = g_inverse(g(t, c), c);
            CHECK(std::fabs(back - t) <= 1e-6 * std::max(1.0, t));
        }
    }

    SUBCASE("wide round trip up to 10 f/p") {
        Rng rng = Rng::stream(10, 0, 0);
        for (int i = 0; i < 300; ++i) {
            const auto f = static_cast<std::int64_t>(8 + rng.next_below(3000));
            const double p = 0.05 + 0.95 * rng.next_unit();
            const ChannelParams c{f, p};
            const double t = rng.next_unit() * 10.0 * static_cast<double>(f) / p;
            const double back = g_inverse(g(t, c), c);
            CHECK(std::fabs(back - t) <= 1e-6 * std::max(1.0, t));
        }
    }
}

TEST_CASE("variance of the frame statistic") {
    const ChannelParams ch{1000, 0.7};
    CHECK(variance_z(0.0, ch) == 0.0);
    CHECK(variance_z(1200.0, ch) == doctest::Approx(9.81276762922e-4).epsilon(1e-10));

    SUBCASE("maximal exactly at the balanced point") {
        // t solving (1 - p/f)^t = 1/2 gives pn = p0 and variance 1/f
        const double t_half = std::log(0.5) / std::log1p(-ch.p / static_cast<double>(ch.f));
        CHECK(variance_z(t_half, ch) == doctest::Approx(1e-3).epsilon(1e-12));
    }
    SUBCASE("bounded by 1/f") {
        Rng rng = Rng::stream(11, 0, 0);
        for (int i = 0; i < 200; ++i) {
            const auto f = static_cast<std::int64_t>(1 + rng.next_below(2000));
            const ChannelParams c{f, 0.05 + 0.95 * rng.next_unit()};
            const double t = rng.next_unit() * 5.0 * static_cast<double>(f);
            const double v = variance_z(t, c);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0 / static_cast<double>(f) + 1e-18);
        }
    }
}

TEST_CASE("per-frame statistic from counts") {
    CHECK(z_statistic(frame_with_busy(8, 0)) == -1.0);
    CHECK(z_statistic(frame_with_busy(4, 2)) == 0.0);
    CHECK(z_statistic(frame_with_busy(4, 3)) == 0.5);

    SUBCASE("inconsistent counts rejected") {
        auto obs = frame_with_busy(4, 3);
        obs.n_zero = 2;
        CHECK_THROWS_AS(z_statistic(obs), InconsistentObservation);
        obs = frame_with_busy(4, 3);
        obs.n_nonempty = 1;
        CHECK_THROWS_AS(z_statistic(obs), InconsistentObservation);
    }

    SUBCASE("count identity on random frames") {
        Rng rng = Rng::stream(12, 0, 0);
        for (int i = 0; i < 500; ++i) {
            const auto f = static_cast<std::int64_t>(1 + rng.next_below(3000));
            const auto busy = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(f + 1)));
            const auto obs = frame_with_busy(f, busy);
            const double z = z_statistic(obs);
            // counts identity is exact in integers ...
            CHECK(obs.n_nonempty - obs.n_zero == 2 * obs.n_nonempty - f);
            // ... and pins z to one expression shape bit for bit
            CHECK(z == static_cast<double>(2 * obs.n_nonempty - f) / static_cast<double>(f));
            // the rearranged float form can differ by one rounding step at most
            const double alt = 2.0 * static_cast<double>(obs.n_nonempty) / static_cast<double>(f) - 1.0;
            CHECK(std::fabs(z - alt) <= 4.0 * std::numeric_limits<double>::epsilon());
        }
    }
}

TEST_CASE("combining rounds into an estimate") {
    const ChannelParams ch{1000, 0.7};

    SUBCASE("all-empty rounds give zero population") {
        const std::vector<FrameObservation> rounds{frame_with_busy(1000, 0),
                                                   frame_with_busy(1000, 0)};
        const auto res = estimate(rounds, ch);
        CHECK(res.z_bar == -1.0);
        REQUIRE(res.t_hat.has_value());
        CHECK(*res.t_hat == 0.0);
        CHECK(res.rounds_used == 2);
        CHECK_FALSE(res.saturated);
    }

    SUBCASE("mean of two informative rounds") {
        // busy counts chosen so the per-round z values are 0.12 and 0.15
        const std::vector<FrameObservation> rounds{frame_with_busy(1000, 560),
                                                   frame_with_busy(1000, 575)};
        const auto res = estimate(rounds, ch);
        CHECK(res.z_bar == doctest::Approx(0.135).epsilon(1e-15));
        REQUIRE(res.t_hat.has_value());
        CHECK(*res.t_hat == g_inverse(res.z_bar, ch));
    }

    SUBCASE("saturation") {
        const std::vector<FrameObservation> rounds{frame_with_busy(1000, 1000),
                                                   frame_with_busy(1000, 1000)};
        const auto res = estimate(rounds, ch);
        CHECK(res.saturated);
        CHECK(res.z_bar == 1.0);
        CHECK_FALSE(res.t_hat.has_value());
    }

    SUBCASE("one saturated round among several is not saturation") {
        const std::vector<FrameObservation> rounds{frame_with_busy(1000, 1000),
                                                   frame_with_busy(1000, 400)};
        const auto res = estimate(rounds, ch);
        CHECK_FALSE(res.saturated);
        REQUIRE(res.t_hat.has_value());
    }

    SUBCASE("input validation") {
        CHECK_THROWS_AS(estimate({}, ch), EmptyInput);
        const std::vector<FrameObservation> mixed{frame_with_busy(1000, 10),
                                                  frame_with_busy(999, 10)};
        CHECK_THROWS_AS(estimate(mixed, ch), MixedFrameSizes);
    }
}

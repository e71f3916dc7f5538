#include <doctest.h>

#include "oracles.hpp"
#include "qwalk/classical.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/series.hpp"
#include "qwalk/walk.hpp"

#include <cmath>
#include <numbers>

using namespace qwalk;

TEST_SUITE("series")
{
    TEST_CASE("power series arithmetic")
    {
        PowerSeries a({1.0, 2.0, 3.0});
        PowerSeries b({0.0, 1.0, -1.0});
        auto p = a * b;
        CHECK(p.order() == 2);
        CHECK(p[0] == 0.0);
        CHECK(p[1] == 1.0);
        CHECK(p[2] == 1.0);
        CHECK(p[10] == 0.0);

        auto s = a;
        s += b;
        CHECK(s[2] == 2.0);
        s -= b;
        CHECK(s[2] == 3.0);
        s *= 2.0;
        CHECK(s[1] == 4.0);

        auto sq = a.pow(2);
        CHECK(sq[2] == 10.0);
        CHECK(a.pow(0)[0] == 1.0);
        CHECK(a.pow(0)[1] == 0.0);

        CHECK(PowerSeries({0.0, 0.0, 5.0}).divided_by_z(2)[0] == 5.0);
        CHECK_THROWS_AS(PowerSeries({1.0, 1.0}).divided_by_z(1), NumericalError);
    }

    TEST_CASE("sqrt(1+z^4) coefficients")
    {
        auto s4 = series_sqrt_one_plus_z4(4);
        const std::vector<double> c4(s4.coefficients().begin(), s4.coefficients().end());
        CHECK(c4 == std::vector<double>{1.0, 0.0, 0.0, 0.0, 0.5});
        CHECK(series_sqrt_one_plus_z4(8)[8] == doctest::Approx(-0.125));

        const auto ref = oracle::sqrt_binomial(12);
        auto s = series_sqrt_one_plus_z4(48);
        for (int k = 0; k <= 12; ++k) {
            CHECK(s[4 * k] == doctest::Approx(ref[k]).epsilon(1e-14));
            if (k < 12) CHECK(s[4 * k + 1] == 0.0);
        }
        auto squared = s * s;
        CHECK(squared[0] == doctest::Approx(1.0));
        CHECK(squared[4] == doctest::Approx(1.0));
        for (std::size_t k = 1; k <= 48; ++k)
            if (k != 4) CHECK(std::abs(squared[k]) < 1e-14);
    }

    TEST_CASE("f and g satisfy their quadratic")
    {
        const std::size_t T = 64;
        const double r2 = std::numbers::sqrt2;
        auto f = series_f(T), g = series_g(T);
        // sqrt(2) z f^2 - 2(1+z^2) f + sqrt(2) z = 0
        PowerSeries z({0.0, 1.0});
        z = z.truncated(T);
        PowerSeries one_z2({1.0, 0.0, 1.0});
        one_z2 = one_z2.truncated(T);
        auto qf = (z * f * f) * r2;
        auto lin = one_z2 * f;
        lin *= 2.0;
        qf -= lin;
        qf += z * r2;
        for (std::size_t k = 0; k <= T; ++k) CHECK(std::abs(qf[k]) < 1e-13);
        CHECK(f[0] == 0.0);
        CHECK(g[0] == 0.0);
        CHECK(f[1] == doctest::Approx(1.0 / r2));
    }

    TEST_CASE("f and g leading terms")
    {
        const double r2 = std::numbers::sqrt2;
        auto f = series_f(40), g = series_g(40);
        CHECK(f[1] == doctest::Approx(1.0 / r2));
        CHECK(g[1] == doctest::Approx(-1.0 / r2));
        auto fg = f * g;
        // (1 - sqrt(1 + z^4)) / z^2
        auto s = series_sqrt_one_plus_z4(42);
        for (std::size_t k = 0; k <= 40; ++k) {
            const double expected = -s[k + 2];
            CHECK(std::abs(fg[k] - expected) <= 1e-14);
        }
    }

    TEST_CASE("m1 = 2 amplitudes")
    {
        auto G = generating_function(2, BasisCoin::L, 64);
        CHECK(G[2] == doctest::Approx(-0.5));
        CHECK(G[6] == doctest::Approx(0.125));
        CHECK(G[10] == doctest::Approx(-0.0625));
        for (std::size_t t = 0; t <= 64; ++t)
            if (t < 2 || (t + 2) % 4 != 0) CHECK(std::abs(G[t]) <= 1e-14);

        auto g1 = generating_function(1, BasisCoin::R, 8);
        CHECK(g1[1] * g1[1] == doctest::Approx(0.5));
        CHECK_THROWS_AS(generating_function(0, BasisCoin::L, 8), ConfigError);
        CHECK_THROWS_AS(generating_function(5, BasisCoin::L, 3), ConfigError);
    }

    TEST_CASE("generating function matches path sums")
    {
        const auto H = hadamard_coin();
        const oracle::Coin hc{H.a, H.b, H.c, H.d};
        for (int m1 : {1, 2, 3}) {
            auto gl = generating_function(m1, BasisCoin::L, 16);
            auto gr = generating_function(m1, BasisCoin::R, 16);
            for (int t = 1; t <= 14; ++t) {
                CHECK(gl[t] * gl[t] == doctest::Approx(oracle::quantum_first_passage(hc, t, m1, 1.0, 0.0)));
                CHECK(gr[t] * gr[t] == doctest::Approx(oracle::quantum_first_passage(hc, t, m1, 0.0, 1.0)));
            }
        }
    }

    TEST_CASE("closed-form absorption probabilities")
    {
        CHECK(quantum_absorption_prob(2) == doctest::Approx(0.25));
        CHECK(quantum_absorption_prob(6) == doctest::Approx(0.015625));
        CHECK(quantum_absorption_prob(4) == 0.0);
        CHECK(quantum_absorption_prob(1) == 0.0);
        auto g = generating_function(2, BasisCoin::L, 200);
        for (int t = 1; t <= 200; ++t) CHECK(g[t] * g[t] == doctest::Approx(quantum_absorption_prob(t)).epsilon(1e-12));
    }

    TEST_CASE("totals at m1 = 2")
    {
        const double P = total_absorption(2, BasisCoin::L, 10000, TailModel::none);
        CHECK(std::abs(P - 0.2732) <= 5e-4);
        CHECK(std::abs(P - (4.0 / std::numbers::pi - 1.0)) <= 5e-4);
        const double ta = avg_absorb_time(2, BasisCoin::L, 16384, TailModel::power_law);
        CHECK(std::abs(ta - 2.66) <= 1e-2);
    }

    TEST_CASE("totals for m1 = 1 and 10")
    {
        CHECK(total_absorption(1, BasisCoin::L, 4096, TailModel::power_law) == doctest::Approx(0.64).epsilon(0.01));
        CHECK(avg_absorb_time(1, BasisCoin::L, 4096, TailModel::power_law) == doctest::Approx(1.57).epsilon(0.01));
        CHECK(std::abs(total_absorption(10, BasisCoin::L, 4096, TailModel::power_law) - 0.14) < 0.01);
    }

    TEST_CASE("tail extrapolation")
    {
        auto g = generating_function(3, BasisCoin::L, 4096);
        auto s = summarize_absorption(g, TailModel::power_law);
        CHECK(s.tail_exponent == doctest::Approx(3.0).epsilon(0.01));
        auto none = summarize_absorption(g, TailModel::none);
        CHECK(none.tail_exponent == 0.0);
        CHECK(s.total >= none.total);
        CHECK(s.mean_time >= none.mean_time);
    }

    TEST_CASE("Raabe estimator")
    {
        auto c = raabe_estimate(classical_mean_time_terms(2), 1'000'000);
        CHECK(std::abs(c.extrapolated - 0.5) <= 0.01);
        CHECK(c.verdict == RaabeVerdict::diverges);

        auto q = raabe_estimate(quantum_mean_time_numerator_terms(), 1'000'000);
        CHECK(std::abs(q.extrapolated - 2.0) <= 0.02);
        CHECK(q.verdict == RaabeVerdict::converges);

        auto g = raabe_estimate(geometric_terms(0.5), 1000);
        CHECK(g.verdict == RaabeVerdict::converges);
        for (const auto& [n, e] : g.estimates) CHECK(e == doctest::Approx(double(n)));

        CHECK_THROWS_AS(raabe_estimate(geometric_terms(0.5), 2), ConfigError);
        CHECK_THROWS_AS(raabe_estimate([] { return -1.0; }, 100), NumericalError);
    }

    TEST_CASE("Raabe term generators follow their closed forms")
    {
        auto u = classical_mean_time_terms(2);
        for (int n = 1; n <= 30; ++n) {
            const int t = 2 + 2 * n;
            const double expected = 2.0 * t * classical_first_passage(t, 2);
            CHECK(u() == doctest::Approx(expected).epsilon(1e-12));
        }
        auto q = quantum_mean_time_numerator_terms();
        for (int m = 1; m <= 30; ++m) {
            const int t = 4 * m - 2;
            CHECK(q() == doctest::Approx(t * quantum_absorption_prob(t)).epsilon(1e-12));
        }
    }
}

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rds/noise.hpp"

using namespace rds::noise;

namespace {

TimeGrid unit_grid(int level = 8, long units = 4) {
    return TimeGrid(1.0, level, units << level);
}

double sample_variance(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("grid validates its parameters") {
    CHECK_THROWS_AS(TimeGrid(-1.0, 4, 16), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(1.0, -1, 16), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(1.0, 4, 0), std::invalid_argument);

    const TimeGrid g(1.0, 10, 32 << 10);
    CHECK(g.step() == 0.0009765625);
    CHECK(g.half_range() == 32.0);
    CHECK(g.index_of(1.0) == 1024);
    CHECK(g.index_of(-2.5) == -2560);
    CHECK(!g.index_of(0.0001).has_value());
}

TEST_CASE("sampled path starts at zero and reproduces bitwise") {
    const auto g = unit_grid();
    for (std::uint64_t seed : {1ull, 7ull, 123456789ull}) {
        const auto p = sample_path(seed, g);
        CHECK(p.value_at_time(0.0) == 0.0);
        const auto q = sample_path(seed, g);
        for (long k = p.min_index(); k <= p.max_index(); ++k) {
            REQUIRE(p.value_at_index(k) == q.value_at_index(k));
        }
    }
    const auto a = sample_path(1, g);
    const auto b = sample_path(2, g);
    CHECK(a.value_at_time(1.0) != b.value_at_time(1.0));
}

TEST_CASE("ensemble variance of B(1) matches Var = |t|") {
    // Monte-Carlo oracle: Var B(1) = 1, spread of the sample variance is
    // sqrt(2/(N-1)).
    const int n_paths = 10000;
    const TimeGrid g(1.0, 4, 1 << 4);
    const NoiseEnsemble ens(42, n_paths, g);
    std::vector<double> values(n_paths);
    for (int i = 0; i < n_paths; ++i) values[static_cast<std::size_t>(i)] = ens.path(i).value_at_time(1.0);
    const double var = sample_variance(values);
    const double se = std::sqrt(2.0 / (n_paths - 1));
    CHECK(std::abs(var - 1.0) < 3.0 * se);
}

TEST_CASE("ensemble regenerates deterministically and seeds differ") {
    const auto g = unit_grid(4, 1);
    const NoiseEnsemble a(99, 16, g);
    const NoiseEnsemble b(99, 16, g);
    for (int i = 0; i < 16; ++i) {
        CHECK(a.seed(i) == b.seed(i));
        CHECK(a.path(i).value_at_time(1.0) == b.path(i).value_at_time(1.0));
    }
    for (int i = 1; i < 16; ++i) CHECK(a.seed(i) != a.seed(0));
}

TEST_CASE("wiener shift: identity, increment reads, flow property, all bitwise") {
    const auto g = unit_grid(8, 8);
    const auto p = sample_path(2024, g);

    const auto same = wiener_shift(p, 0.0);
    for (long k = p.min_index(); k <= p.max_index(); ++k) {
        REQUIRE(same.value_at_index(k) == p.value_at_index(k));
    }

    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        const double h = g.step();
        const long jt = static_cast<long>(rng() % 1024) - 512;
        const long js = static_cast<long>(rng() % 512) - 256;
        const double t = static_cast<double>(jt) * h;
        const double s = static_cast<double>(js) * h;

        const auto shifted = wiener_shift(p, t);
        CHECK(shifted.origin_offset() == t);
        // B_s(theta_t omega) = B_{t+s}(omega) - B_t(omega), bitwise
        REQUIRE(shifted.value_at_index(js) ==
                p.value_at_index(jt + js) - p.value_at_index(jt));

        // flow: theta_s theta_t = theta_{t+s}, bitwise on the common domain
        const auto twice = wiener_shift(shifted, s);
        const auto once = wiener_shift(p, static_cast<double>(jt + js) * h);
        for (long k = twice.min_index(); k <= twice.max_index(); k += 37) {
            REQUIRE(twice.value_at_index(k) == once.value_at_index(k));
        }
    }
}

TEST_CASE("non-grid shift: strict mode throws, permissive mode is flagged") {
    const auto g = unit_grid(4, 2);
    const auto p = sample_path(3, g);
    CHECK_THROWS_AS(wiener_shift(p, 0.1), std::invalid_argument);

    const auto q = wiener_shift_interpolated(p, 0.1);
    CHECK(q.interpolated());
    CHECK(q.value_at_time(0.0) == 0.0);
    // value agrees with interpolated reads off the original path
    CHECK(q.value_at_time(0.5) == doctest::Approx(evaluate(p, 0.6) - evaluate(p, 0.1)).epsilon(1e-12));

    // grid shifts stay exact even through the permissive entry point
    const auto r = wiener_shift_interpolated(p, 0.5);
    CHECK(!r.interpolated());
}

TEST_CASE("evaluate: grid reads exact, midpoint is the average") {
    const auto g = unit_grid(4, 2);
    const auto p = sample_path(11, g);
    CHECK(evaluate(p, 0.0) == 0.0);
    CHECK(evaluate(p, 0.25) == p.value_at_time(0.25));
    const double a = p.value_at_time(0.25);
    const double b = p.value_at_time(0.3125);
    CHECK(evaluate(p, 0.28125) == (a + b) / 2.0);
    CHECK_THROWS_AS(evaluate(p, 3.0), std::out_of_range);
}

TEST_CASE("ito integral: telescoping, zero path, linearity, additivity") {
    const auto g = unit_grid(8, 2);
    const auto p = sample_path(17, g);
    const auto one = [](double) { return 1.0; };

    const double direct = p.value_at_time(1.5) - p.value_at_time(0.0);
    CHECK(ito_integral(p, one, 0.0, 1.5) == doctest::Approx(direct).epsilon(1e-12));

    const auto z = zero_path(g);
    CHECK(ito_integral(z, [](double s) { return std::exp(s); }, -1.0, 1.0) == 0.0);

    // linearity in the integrand
    const auto f = [](double s) { return std::sin(s); };
    const auto h = [](double s) { return s * s; };
    const double lhs = ito_integral(p, [&](double s) { return 2.0 * f(s) - 3.0 * h(s); }, -1.0, 1.0);
    const double rhs = 2.0 * ito_integral(p, f, -1.0, 1.0) - 3.0 * ito_integral(p, h, -1.0, 1.0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

    // additivity over adjacent intervals
    const double whole = ito_integral(p, f, -1.5, 1.5);
    const double split = ito_integral(p, f, -1.5, 0.25) + ito_integral(p, f, 0.25, 1.5);
    CHECK(whole == doctest::Approx(split).epsilon(1e-12));

    CHECK_THROWS_AS(ito_integral(p, one, 0.0, 5.0), std::out_of_range);
    CHECK_THROWS_AS(ito_integral(p, one, 0.1, 0.7), std::invalid_argument);
}

TEST_CASE("ito integral against the integration-by-parts oracle") {
    // oracle: int_a^b e^s dB = e^b B(b) - e^a B(a) - sum e^{s_k} B(s_k) h,
    // independent route on the same grid, O(h) agreement expected.
    for (int level : {6, 8}) {
        const TimeGrid g(1.0, level, 2L << level);
        const double h = g.step();
        const auto p = sample_path(29, g);
        const double a = -1.0, b = 1.5;
        const double impl = ito_integral(p, [](double s) { return std::exp(s); }, a, b);
        double riemann = 0.0;
        for (long k = g.index_of(a).value(); k < g.index_of(b).value(); ++k) {
            const double s = static_cast<double>(k) * h;
            riemann += std::exp(s) * p.value_at_index(k) * h;
        }
        const double oracle =
            std::exp(b) * p.value_at_time(b) - std::exp(a) * p.value_at_time(a) - riemann;
        CHECK(std::abs(impl - oracle) < 10.0 * h);
    }
}

TEST_CASE("pullback exp integral: zero-path closed forms") {
    const TimeGrid g(1.0, 10, 32 << 10);
    const auto z = zero_path(g);
    // int_{-inf}^0 e^{2s} ds = 1/2, trapezoid error O(h^2)
    CHECK(pullback_exp_integral(z, 2.0, 2.0, 1e-8) == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(pullback_exp_integral(z, 1.0, 1.0, 1e-6) == doctest::Approx(1.0).epsilon(1e-5));
    // full-domain mode integrates everything available
    CHECK(pullback_exp_integral(z, 2.0, 2.0, 0.0) == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("pullback exp integral: adaptive truncation is self-consistent") {
    const TimeGrid g(1.0, 8, 48 << 8);
    for (std::uint64_t seed : {5ull, 6ull, 7ull}) {
        const auto p = sample_path(seed, g);
        const double tol = 1e-4;
        const double coarse = pullback_exp_integral(p, 2.0, 2.0, tol);
        const double fine = pullback_exp_integral(p, 2.0, 2.0, tol / 2.0);
        CHECK(std::abs(fine - coarse) < tol * std::abs(coarse));
    }
}

TEST_CASE("pullback exp integral: domain exhaustion carries partials") {
    const TimeGrid g(1.0, 6, 2 << 6);  // only reaches -2
    const auto p = sample_path(8, g);
    try {
        (void)pullback_exp_integral(p, 2.0, 2.0, 1e-12);
        FAIL("expected DomainExhaustedError");
    } catch (const DomainExhaustedError& e) {
        CHECK(std::isfinite(e.previous_partial));
        CHECK(std::isfinite(e.last_partial));
    }
}

TEST_CASE("pullback ito integral: zero path and isometry variance") {
    const TimeGrid coarse(1.0, 8, 16 << 8);
    CHECK(pullback_ito_integral(zero_path(coarse), 1.0, 1e-6) == 0.0);

    // Ito isometry: Var int_{-inf}^0 e^s dB = int_{-inf}^0 e^{2s} ds = 1/2
    const int n_paths = 10000;
    const NoiseEnsemble ens(77, n_paths, coarse);
    std::vector<double> values(n_paths);
    for (int i = 0; i < n_paths; ++i) {
        values[static_cast<std::size_t>(i)] = pullback_ito_integral(ens.path(i), 1.0, 0.0);
    }
    const double var = sample_variance(values);
    const double se = 0.5 * std::sqrt(2.0 / (n_paths - 1));
    CHECK(std::abs(var - 0.5) < 3.0 * se);
}

TEST_CASE("pullback ito integral against integration by parts") {
    // oracle: int_{-inf}^0 e^s dB = -int_{-inf}^0 e^s B(s) ds since B(0) = 0
    const TimeGrid g(1.0, 9, 40 << 9);
    const double h = g.step();
    for (std::uint64_t seed : {31ull, 32ull}) {
        const auto p = sample_path(seed, g);
        const double impl = pullback_ito_integral(p, 1.0, 0.0);
        double oracle = 0.0;
        for (long k = p.min_index(); k < 0; ++k) {
            oracle -= std::exp(static_cast<double>(k) * h) * p.value_at_index(k) * h;
        }
        CHECK(std::abs(impl - oracle) < 10.0 * h);
    }
}

TEST_CASE("measure preservation: Var B_t(theta_u omega) = |t| statistically") {
    const int n_paths = 4000;
    const TimeGrid g(1.0, 4, 4 << 4);
    const NoiseEnsemble ens(2718, n_paths, g);
    for (double u : {-1.0, 0.0, 1.0}) {
        for (double t : {0.5, 2.0}) {
            std::vector<double> values(n_paths);
            for (int i = 0; i < n_paths; ++i) {
                values[static_cast<std::size_t>(i)] =
                    wiener_shift(ens.path(i), u).value_at_time(t);
            }
            const double var = sample_variance(values);
            const double se = t * std::sqrt(2.0 / (n_paths - 1));
            CHECK(std::abs(var - t) < 3.0 * se);
        }
    }
}

TEST_CASE("coarsened path subsamples the same realization") {
    const auto g = unit_grid(8, 2);
    const auto p = sample_path(55, g);
    const auto c = p.coarsened(4);
    CHECK(c.grid().step() == 4.0 * g.step());
    for (long k = c.min_index(); k <= c.max_index(); ++k) {
        REQUIRE(c.value_at_index(k) == p.value_at_index(4 * k));
    }
    CHECK_THROWS_AS(p.coarsened(3), std::invalid_argument);
}

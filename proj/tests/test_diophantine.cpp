#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rds/diophantine.hpp"

using namespace rds::dio;

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TEST_CASE("continued fraction of sqrt(2)") {
    const auto cf = continued_fraction(kSqrt2, 10);
    REQUIRE(cf.partial_quotients.size() == 10);
    CHECK(cf.partial_quotients[0] == 1);
    for (std::size_t i = 1; i < cf.partial_quotients.size(); ++i) {
        CHECK(cf.partial_quotients[i] == 2);
    }
    // denominators 1, 2, 5, 12, 29, 70 (hand-checked) and |q*g - p| decreasing
    const long long expected_q[] = {1, 2, 5, 12, 29, 70};
    for (int i = 0; i < 6; ++i) CHECK(cf.convergents[static_cast<std::size_t>(i)].second == expected_q[i]);
    double prev = 1e9;
    for (const auto& [p, q] : cf.convergents) {
        const double err = std::abs(static_cast<double>(q) * kSqrt2 - static_cast<double>(p));
        CHECK(err < prev);
        prev = err;
        CHECK(std::gcd(p, q) == 1);
    }
    CHECK(!cf.rational);
    // |12 sqrt2 - 17| ~ 0.029437, direct arithmetic
    CHECK(std::abs(12.0 * kSqrt2 - 17.0) == doctest::Approx(0.0294372515228594).epsilon(1e-9));
}

TEST_CASE("continued fraction flags rationals") {
    const auto half = continued_fraction(0.5, 10);
    CHECK(half.rational);
    CHECK(half.partial_quotients[0] == 0);
    CHECK(half.partial_quotients[1] == 2);

    const auto three = continued_fraction(3.0, 5);
    CHECK(three.rational);
    CHECK(three.convergents[0] == std::pair<long long, long long>{3, 1});
}

TEST_CASE("almost periods of sqrt(2) at epsilon 0.05") {
    const auto set = almost_periods(kSqrt2, 0.05, 200.0);
    const auto has = [&](double tau) {
        for (double t : set.taus)
            if (t == tau) return true;
        return false;
    };
    CHECK(has(12.0));
    CHECK(has(29.0));
    CHECK(!has(7.0));  // |{7 sqrt2}| ~ 0.1005
    // deviations certified against direct arithmetic
    for (std::size_t i = 0; i < set.taus.size(); ++i) {
        const double n = set.taus[i];
        const double dev = std::abs(n * kSqrt2 - std::round(n * kSqrt2));
        CHECK(set.deviations[i] == doctest::Approx(dev).epsilon(1e-12));
        CHECK(set.deviations[i] < 0.05);
    }
    CHECK(set.inclusion_length > 0.0);
    CHECK(set.cf_seed_complete);

    const auto density = verify_relative_density(set);
    CHECK(density.ok);
    CHECK(density.certified_length == set.inclusion_length);
}

TEST_CASE("integer gamma and huge epsilon make every integer an almost period") {
    const auto all1 = almost_periods(3.0, 0.01, 100.0);
    CHECK(all1.taus.size() == 101);
    CHECK(all1.inclusion_length == 1.0);

    const auto all2 = almost_periods(kSqrt2, 0.6, 100.0);
    CHECK(all2.taus.size() == 101);
    CHECK(all2.inclusion_length == 1.0);
}

TEST_CASE("window too small reports an error") {
    CHECK_THROWS_AS(almost_periods(kSqrt2, 0.05, 5.0), std::runtime_error);
}

TEST_CASE("relative density failure pins the offending interval") {
    AlmostPeriodSet set;
    set.window = 100.0;
    set.taus = {0.0};
    set.deviations = {0.0};
    set.inclusion_length = 100.0;
    const auto fail = verify_relative_density(set, 50.0);
    CHECK(!fail.ok);
    CHECK(fail.certified_length == 100.0);
    CHECK(fail.offending_lo == 0.0);
    CHECK(fail.offending_hi == 100.0);

    const auto pass = verify_relative_density(set, 100.0);
    CHECK(pass.ok);
}

TEST_CASE("torus-flow almost periods on a tau grid") {
    // t1 = 1, t2 = 1/sqrt2: deviation at integer tau is |{tau sqrt2}|
    const auto set = almost_periods_torus_flow(1.0, 1.0 / kSqrt2, 0.05, 100.0, 0.5);
    bool has12 = false;
    for (std::size_t i = 0; i < set.taus.size(); ++i) {
        if (set.taus[i] == 12.0) {
            has12 = true;
            CHECK(set.deviations[i] == doctest::Approx(std::abs(12.0 * kSqrt2 - 17.0)).epsilon(1e-9));
        }
    }
    CHECK(has12);
}

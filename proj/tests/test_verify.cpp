#include <doctest.h>

#include <cmath>

#include "rds/verify.hpp"

using namespace rds;
using namespace rds::verify;
using systems::Kind;

namespace {

const double kSqrt2 = std::sqrt(2.0);
constexpr double kTwoPi = 6.283185307179586476925286766559;

noise::NoiseEnsemble small_ensemble(std::uint64_t seed, int n = 8, int level = 8, long units = 16,
                                    double base = 1.0) {
    return noise::NoiseEnsemble(seed, n, noise::TimeGrid(base, level, units << level));
}

}  // namespace

TEST_CASE("cocycle law: OU exact on the grid, t = s = 0 residual zero") {
    const auto desc = systems::make_ou();
    const auto ens = small_ensemble(101, 8);
    auto matrix = default_matrix(desc);
    const auto rep = check_cocycle(desc, ens, matrix);
    CHECK(rep.sup_residual < 1e-9);
    CHECK(rep.mean_residual <= rep.sup_residual);
    CHECK(rep.n_samples == 8 * 8 * 8 * 4);

    matrix.s_values = {0.0};
    matrix.t_values = {0.0};
    const auto zero = check_cocycle(desc, ens, matrix);
    CHECK(zero.sup_residual == 0.0);
}

TEST_CASE("cocycle law: quadrature-backed systems stay on the exactness island") {
    for (Kind kind : {Kind::pitchfork, Kind::cylinder, Kind::torus}) {
        systems::SystemDescriptor desc;
        double base = 1.0;
        switch (kind) {
            case Kind::pitchfork: desc = systems::make_pitchfork(); break;
            case Kind::cylinder: desc = systems::make_cylinder(0.1); base = kTwoPi; break;
            default: desc = systems::make_torus(kSqrt2, 0.0, 0.2); break;
        }
        const auto ens = small_ensemble(7, 4, 8, 8, base);
        const auto matrix = default_matrix(desc, base);
        const auto rep = check_cocycle(desc, ens, matrix);
        CHECK(rep.sup_residual < 1e-3);   // quadrature-tolerance bound
        CHECK(rep.sup_residual < 1e-11);  // in fact grid-algebraic
    }
}

TEST_CASE("stationarity: OU and pitchfork reference sections, discrete identity") {
    const std::vector<double> times = {0.25, 0.5, 1.0, 2.0};
    for (Kind kind : {Kind::ou, Kind::pitchfork}) {
        const auto desc = kind == Kind::ou ? systems::make_ou() : systems::make_pitchfork();
        const auto section = systems::reference_section(desc);
        const auto ens = small_ensemble(55, 8);
        const auto rep = check_stationary(desc, section, ens, times);
        CHECK(rep.sup_residual < 1e-9);
    }
}

TEST_CASE("stationarity: the unscaled pullback variant fails the identity") {
    // dropping the factor 2 in the radial pullback breaks stationarity by
    // an O(1) margin; this guards the adopted convention
    const auto desc = systems::make_pitchfork();
    systems::SolutionSection bad;
    bad.desc = desc;
    bad.eval = [](double t, const noise::BrownianPath& path) -> systems::StatePoint {
        return systems::real_point(
            1.0 / std::sqrt(noise::pullback_exp_integral(noise::wiener_shift(path, t), 2.0, 2.0, 0.0)));
    };
    const auto ens = small_ensemble(55, 8);
    const auto rep = check_stationary(desc, bad, ens, {0.5, 1.0, 2.0});
    CHECK(rep.sup_residual > 0.1);
}

TEST_CASE("random periodicity: cylinder with tau = 2 pi") {
    const auto desc = systems::make_cylinder(0.25);
    const auto section = systems::reference_section(desc);
    const auto ens = small_ensemble(19, 6, 8, 8, kTwoPi);
    const std::vector<double> s_values = {0.0, kTwoPi / 4, kTwoPi / 2};
    const std::vector<double> t_values = {kTwoPi / 4, kTwoPi};
    const auto rep = check_random_periodic(desc, section, kTwoPi, ens, s_values, t_values);
    CHECK(rep.flow.sup_residual < 1e-6);
    CHECK(rep.shift.sup_residual < 1e-6);

    // half turn: the angle misses by {1/2} = 1/2
    const auto half = check_random_periodic(desc, section, kTwoPi / 2, ens, s_values, t_values);
    CHECK(half.shift.sup_residual > 0.49);

    // any stationary section is tau-periodic for every tau (shift identity)
    const auto ou = systems::make_ou();
    const auto ou_section = systems::reference_section(ou);
    const auto ens1 = small_ensemble(20, 6);
    const auto stat = check_random_periodic(ou, ou_section, 3.0, ens1, {0.0, 0.5}, {0.5, 1.0});
    CHECK(stat.shift.sup_residual < 1e-9);
}

TEST_CASE("rap certificate: torus deviations match the closed form") {
    const auto desc = systems::make_torus(kSqrt2, 0.0, 0.0);
    const auto section = systems::reference_section(desc);
    const auto taus = dio::almost_periods(kSqrt2, 0.05, 64.0);
    noise::NoiseEnsemble ens(31, 4, noise::TimeGrid(1.0, 6, 80L << 6));
    const auto cert =
        check_rap(desc, section, 0.05, taus, ens, {0.0, 0.5, 2.0}, {0.5, 1.0});
    CHECK(cert.passed);
    CHECK(cert.density_ok);
    // sup over the certified set equals the closed-form worst member
    double expect_sup = 0.0;
    for (double tau : taus.taus) {
        expect_sup = std::max(expect_sup, std::abs(systems::frac_nearest(kSqrt2 * tau)));
    }
    CHECK(cert.sup_deviation == doctest::Approx(expect_sup).epsilon(1e-9));
    CHECK(cert.flow.sup_residual < 1e-9);

    // on a window where {0, 12} is the whole set, the sup sits at tau = 12
    const auto taus12 = dio::almost_periods(kSqrt2, 0.05, 16.0);
    REQUIRE(taus12.taus == std::vector<double>{0.0, 12.0});
    const auto cert12 = check_rap(desc, section, 0.05, taus12, ens, {0.0, 0.5}, {0.5});
    CHECK(cert12.worst_tau == 12.0);
    CHECK(cert12.sup_deviation ==
          doctest::Approx(std::abs(12.0 * kSqrt2 - 17.0)).epsilon(1e-9));
    for (std::size_t k = 0; k < cert.per_tau.size(); ++k) {
        const double tau = cert.tau_set.taus[k];
        const double expect = std::abs(systems::frac_nearest(kSqrt2 * tau));
        CHECK(cert.per_tau[k] == doctest::Approx(expect).epsilon(1e-9));
    }

    // adversarial tau set: {6} has deviation ~0.485
    dio::AlmostPeriodSet bad;
    bad.gamma = kSqrt2;
    bad.epsilon = 0.05;
    bad.taus = {6.0};
    bad.deviations = {0.485};
    bad.window = 64.0;
    bad.inclusion_length = 64.0;
    const auto fail = check_rap(desc, section, 0.05, bad, ens, {0.0}, {0.5});
    CHECK(!fail.passed);
    CHECK(fail.sup_deviation > 0.4);
}

TEST_CASE("rap monotone in epsilon") {
    const auto desc = systems::make_torus(kSqrt2);
    const auto section = systems::reference_section(desc);
    const auto taus = dio::almost_periods(kSqrt2, 0.05, 64.0);
    noise::NoiseEnsemble ens(31, 2, noise::TimeGrid(1.0, 6, 80L << 6));
    const auto tight = check_rap(desc, section, 0.05, taus, ens, {0.0, 1.0}, {0.5});
    const auto loose = check_rap(desc, section, 0.25, taus, ens, {0.0, 1.0}, {0.5});
    CHECK(tight.passed);
    CHECK(loose.passed);  // passing at eps implies passing at larger eps
    CHECK(tight.sup_deviation == loose.sup_deviation);
}

TEST_CASE("rap: OU stationary-induced section passes with any integer tau set") {
    const auto desc = systems::make_ou();
    const auto section = systems::reference_section(desc);
    dio::AlmostPeriodSet taus;
    taus.epsilon = 1e-6;
    taus.taus = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    taus.deviations.assign(6, 0.0);
    taus.window = 5.0;
    taus.inclusion_length = 1.0;
    const auto ens = small_ensemble(77, 6);
    const auto cert = check_rap(desc, section, 1e-6, taus, ens, {0.0, 0.5, 1.0}, {0.5});
    CHECK(cert.passed);
    CHECK(cert.sup_deviation < 1e-9);
}

TEST_CASE("lipschitz estimate: OU contraction, torus rotation isometry") {
    const auto ou = systems::make_ou();
    const auto ens = small_ensemble(41, 6);
    std::vector<std::pair<systems::StatePoint, systems::StatePoint>> pairs = {
        {systems::real_point(-1.0), systems::real_point(1.0)},
        {systems::real_point(0.2), systems::real_point(0.7)},
        {systems::real_point(0.5), systems::real_point(0.5)},  // coincident, skipped
    };
    const auto est = estimate_lipschitz(ou, ens, {0.25, 0.5, 1.0, 2.0}, pairs);
    CHECK(est.value <= 1.0 + 1e-9);
    CHECK(est.value > 0.1);
    CHECK(est.n_pairs == 6 * 4 * 2);

    // torus pairs differing only in the angles: rotation is an isometry
    const auto torus = systems::make_torus(kSqrt2);
    std::vector<std::pair<systems::StatePoint, systems::StatePoint>> tpairs = {
        {systems::torus_point(1.0, 0.1, 0.0), systems::torus_point(1.0, 0.4, 0.0)},
        {systems::torus_point(0.7, 0.0, -0.2), systems::torus_point(0.7, 0.0, 0.3)},
    };
    noise::NoiseEnsemble tens(43, 4, noise::TimeGrid(1.0, 8, 16L << 8));
    const auto iso = estimate_lipschitz(torus, tens, {0.5, 1.0, 2.0}, tpairs);
    CHECK(iso.value == doctest::Approx(1.0).epsilon(1e-12));

    // pitchfork on a bounded region: finite, stable under sample doubling
    const auto pf = systems::make_pitchfork();
    std::vector<std::pair<systems::StatePoint, systems::StatePoint>> ppairs;
    for (double x = 0.5; x < 2.0; x += 0.25) {
        ppairs.emplace_back(systems::real_point(x), systems::real_point(x + 0.25));
    }
    const auto ens_a = small_ensemble(42, 8);
    const auto ens_b = small_ensemble(42, 16);
    const auto la = estimate_lipschitz(pf, ens_a, {0.5, 1.0, 2.0}, ppairs);
    const auto lb = estimate_lipschitz(pf, ens_b, {0.5, 1.0, 2.0}, ppairs);
    CHECK(std::isfinite(la.value));
    CHECK(la.value > 0.0);
    CHECK(std::abs(lb.value - la.value) < 0.05 * std::max(la.value, lb.value) + 1e-9);
}

TEST_CASE("theorem on transported initial conditions: OU stationary passes") {
    const auto desc = systems::make_ou();
    const auto ref = systems::reference_section(desc);
    const auto h0 = [&](const noise::BrownianPath& p) { return ref.eval(0.0, p); };
    dio::AlmostPeriodSet taus;
    taus.taus = {1.0, 2.0, 5.0};
    taus.deviations = {0.0, 0.0, 0.0};
    taus.epsilon = 1e-6;
    taus.window = 5.0;
    taus.inclusion_length = 2.0;
    const auto ens = small_ensemble(88, 8);
    const auto rep = check_thm45_condition(desc, h0, taus, 1e-6, ens, {0.0, 0.5, 1.0});
    CHECK(rep.condition_backward.sup_residual < 1e-9);
    CHECK(rep.condition_forward.sup_residual < 1e-9);
    CHECK(rep.conclusion_sup < 1e-9);
    CHECK(rep.lipschitz <= 1.0 + 1e-9);
    CHECK(rep.passed);

    // constant non-stationary initial value: strictly positive condition sup
    const auto c0 = [](const noise::BrownianPath&) { return systems::real_point(1.0); };
    dio::AlmostPeriodSet tau10;
    tau10.taus = {10.0};
    tau10.deviations = {0.0};
    tau10.epsilon = 1e-6;
    tau10.window = 10.0;
    tau10.inclusion_length = 10.0;
    noise::NoiseEnsemble far(91, 8, noise::TimeGrid(1.0, 8, 24L << 8));
    const auto bad = check_thm45_condition(desc, c0, tau10, 1e-6, far, {0.0, 0.5});
    CHECK(bad.condition_backward.sup_residual > 0.1);
    CHECK(!bad.passed);

    // huge epsilon: trivially passed
    const auto trivial = check_thm45_condition(desc, c0, tau10, 1e6, far, {0.0, 0.5});
    CHECK(trivial.passed);
}

TEST_CASE("product construction check: hypotheses and conclusion") {
    const auto g = systems::make_ou();
    const auto prod = systems::product_cocycle(1.0, 1.0 / kSqrt2, g);
    const double eps = 0.05;
    const auto taus = dio::almost_periods(kSqrt2, eps / kSqrt2, 64.0);
    noise::NoiseEnsemble ens(13, 4, noise::TimeGrid(1.0, 6, 80L << 6));
    const auto rep = check_thm43(prod, eps, taus, ens, {0.0, 0.5, 1.0});
    CHECK(rep.passed);
    CHECK(rep.deterministic_ok);
    CHECK(rep.random_sup < 1e-9);  // stationary z-component cancels
    CHECK(rep.combined_sup < eps);
    CHECK(!rep.violating_tau.has_value());

    // constructed counterexample: tau = 7 violates the deterministic bound
    dio::AlmostPeriodSet bad = taus;
    bad.taus.push_back(7.0);
    bad.deviations.push_back(0.1);
    const auto fail = check_thm43(prod, eps, bad, ens, {0.0, 0.5});
    CHECK(!fail.passed);
    CHECK(fail.violating_tau.has_value());
    CHECK(*fail.violating_tau == 7.0);
}

TEST_CASE("convergence studies: coarse-grid residuals shrink against the fine reference") {
    const auto desc = systems::make_pitchfork();
    noise::NoiseEnsemble fine(5, 6, noise::TimeGrid(1.0, 12, 10L << 12));
    SampleMatrix matrix;
    matrix.s_values = {0.25, 0.75};
    matrix.t_values = {0.5, 1.25};
    matrix.states = {systems::real_point(0.5), systems::real_point(1.0), systems::real_point(2.0)};
    const auto cocycle = cocycle_convergence_study(desc, fine, matrix, {5, 6, 7, 8, 9});
    CHECK(cocycle.slope > 0.8);
    CHECK(cocycle.mean.front() > cocycle.mean.back());

    const auto section = systems::reference_section(desc);
    const auto stationary =
        stationary_convergence_study(desc, section, fine, {0.25, 0.5, 1.0, 1.5, 2.0}, {5, 6, 7, 8, 9});
    CHECK(stationary.slope > 0.8);
}

TEST_CASE("least squares slope") {
    CHECK(least_squares_slope({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(least_squares_slope({0.0}, {1.0}), std::invalid_argument);
}

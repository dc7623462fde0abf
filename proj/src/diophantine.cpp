#include "rds/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace rds::dio {

namespace {

constexpr double kQuotientBlowup = 1.0e8;

double frac_nearest(double x) { return x - std::ceil(x - 0.5); }

// Max gap between consecutive members with the window ends included.
struct GapScan {
    double max_gap;
    double lo;
    double hi;
};

GapScan max_gap(const std::vector<double>& taus, double window) {
    GapScan g{0.0, 0.0, 0.0};
    double prev = 0.0;
    for (double tau : taus) {
        if (tau - prev > g.max_gap) {
            g.max_gap = tau - prev;
            g.lo = prev;
            g.hi = tau;
        }
        prev = tau;
    }
    if (window - prev > g.max_gap) {
        g.max_gap = window - prev;
        g.lo = prev;
        g.hi = window;
    }
    return g;
}

}  // namespace

ContinuedFraction continued_fraction(double gamma, int depth) {
    if (!std::isfinite(gamma)) throw std::invalid_argument("continued_fraction: gamma not finite");
    if (depth < 1) throw std::invalid_argument("continued_fraction: depth must be >= 1");

    ContinuedFraction cf;
    cf.target = gamma;

    double x = gamma;
    long long p_prev = 1, p_prev2 = 0;  // p_{-1}, p_{-2}
    long long q_prev = 0, q_prev2 = 1;  // q_{-1}, q_{-2}
    for (int i = 0; i < depth; ++i) {
        const double a_real = std::floor(x);
        if (a_real > kQuotientBlowup || (i > 0 && a_real < 1.0)) {
            cf.rational = true;
            break;
        }
        const long long a = static_cast<long long>(a_real);
        const long long p = a * p_prev + p_prev2;
        const long long q = a * q_prev + q_prev2;
        if (q < 0 || p > (1LL << 62) || p < -(1LL << 62)) break;  // overflow guard
        cf.partial_quotients.push_back(a);
        cf.convergents.emplace_back(p, q);
        p_prev2 = p_prev;
        p_prev = p;
        q_prev2 = q_prev;
        q_prev = q;

        const double frac = x - a_real;
        if (frac == 0.0) {
            cf.rational = true;
            break;
        }
        x = 1.0 / frac;
    }
    return cf;
}

AlmostPeriodSet almost_periods(double gamma, double epsilon, double window) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("almost_periods: epsilon must be > 0");
    if (!(window > 0.0)) throw std::invalid_argument("almost_periods: window must be > 0");

    AlmostPeriodSet set;
    set.gamma = gamma;
    set.epsilon = epsilon;
    set.window = window;

    const long long n_max = static_cast<long long>(std::floor(window));

    // CF-seeded candidates: integer combinations n = a*q_i + b*q_j of two
    // convergent denominators. In the regime |a s_i + b s_j| <= 1/2 with
    // s = {gamma q} signed, {gamma n} = a s_i + b s_j exactly, so the
    // predicted deviation is the signed sum; the b-range is narrowed to the
    // band where cancellation below epsilon is possible.
    const auto cf = continued_fraction(gamma, 20);
    std::set<long long> seeded;
    seeded.insert(0);
    const bool seed_check_possible = !cf.rational;
    if (seed_check_possible) {
        std::vector<std::pair<long long, double>> dens;  // (q, signed {gamma q})
        for (const auto& [p, q] : cf.convergents) {
            (void)p;
            if (q >= 1 && q <= n_max) {
                dens.emplace_back(q, frac_nearest(gamma * static_cast<double>(q)));
            }
        }
        for (std::size_t i = 0; i < dens.size(); ++i) {
            for (std::size_t j = i; j < dens.size(); ++j) {
                const auto [qi, si] = dens[i];
                const auto [qj, sj] = dens[j];
                if (sj == 0.0) continue;
                for (long long a = 0; a * qi <= n_max; ++a) {
                    const double center = -static_cast<double>(a) * si / sj;
                    const double half_band = epsilon / std::abs(sj) + 1.0;
                    const long long b_lo = std::max<long long>(
                        0, static_cast<long long>(std::floor(center - half_band)));
                    const long long b_hi = std::min(
                        (n_max - a * qi) / qj,
                        static_cast<long long>(std::ceil(center + half_band)));
                    for (long long b = b_lo; b <= b_hi; ++b) {
                        const double predicted = static_cast<double>(a) * si +
                                                 static_cast<double>(b) * sj;
                        if (std::abs(predicted) < epsilon) seeded.insert(a * qi + b * qj);
                    }
                }
            }
        }
    }

    // Exhaustive scan certifies; the seeds only feed the completeness check.
    for (long long n = 0; n <= n_max; ++n) {
        const double dev = std::abs(frac_nearest(gamma * static_cast<double>(n)));
        if (dev < epsilon) {
            set.taus.push_back(static_cast<double>(n));
            set.deviations.push_back(dev);
            if (seed_check_possible && dev < 0.5 * epsilon && seeded.find(n) == seeded.end()) {
                set.cf_seed_complete = false;
            }
        }
    }
    if (set.taus.size() <= 1) {
        // only the trivial tau = 0
        throw std::runtime_error("almost_periods: window too small, no nontrivial member found");
    }
    set.inclusion_length = max_gap(set.taus, window).max_gap;
    return set;
}

AlmostPeriodSet almost_periods_torus_flow(double t1, double t2, double epsilon,
                                          double window, double step) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("almost_periods_torus_flow: epsilon > 0");
    if (!(window > 0.0) || !(step > 0.0)) {
        throw std::invalid_argument("almost_periods_torus_flow: window and step must be > 0");
    }
    AlmostPeriodSet set;
    set.epsilon = epsilon;
    set.window = window;
    const long long k_max = static_cast<long long>(std::floor(window / step));
    for (long long k = 0; k <= k_max; ++k) {
        const double tau = static_cast<double>(k) * step;
        const double d1 = frac_nearest(tau / t1);
        const double d2 = frac_nearest(tau / t2);
        const double dev = std::sqrt(d1 * d1 + d2 * d2);
        if (dev < epsilon) {
            set.taus.push_back(tau);
            set.deviations.push_back(dev);
        }
    }
    if (set.taus.size() <= 1) {
        throw std::runtime_error("almost_periods_torus_flow: window too small");
    }
    set.inclusion_length = max_gap(set.taus, window).max_gap;
    return set;
}

DensityCheck verify_relative_density(const AlmostPeriodSet& set, double claimed) {
    if (set.taus.empty()) throw std::invalid_argument("verify_relative_density: empty set");
    std::vector<double> taus = set.taus;
    std::sort(taus.begin(), taus.end());
    const GapScan g = max_gap(taus, set.window);
    DensityCheck check;
    check.certified_length = g.max_gap;
    check.ok = g.max_gap <= claimed;
    if (!check.ok) {
        check.offending_lo = g.lo;
        check.offending_hi = g.hi;
    }
    return check;
}

DensityCheck verify_relative_density(const AlmostPeriodSet& set) {
    return verify_relative_density(set, set.inclusion_length);
}

}  // namespace rds::dio

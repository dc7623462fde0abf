#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace rds::dio {

/// Continued-fraction expansion of a real target with the convergents
/// p_k/q_k. `rational` is set when the Gauss map terminates or a partial
/// quotient exceeds 1e8 (the CF structure of a floating-point number stops
/// being informative there).
struct ContinuedFraction {
    double target = 0.0;
    std::vector<long long> partial_quotients;
    std::vector<std::pair<long long, long long>> convergents;  // (p, q)
    bool rational = false;
};

ContinuedFraction continued_fraction(double gamma, int depth);

/// Certified epsilon-almost-periods on [0, window] with their deviations
/// and the observed inclusion length.
struct AlmostPeriodSet {
    double gamma = 0.0;
    double epsilon = 0.0;
    std::vector<double> taus;        // sorted ascending
    std::vector<double> deviations;  // deviation certified for each tau
    double inclusion_length = 0.0;
    double window = 0.0;
    /// True when every scan member with deviation < eps/2 is an integer
    /// combination of at most two convergent denominators; a failure
    /// demotes the construction to scan-only (result unchanged).
    bool cf_seed_complete = true;
};

/// Integer almost-periods of the irrational rotation by gamma: all n in
/// [0, window] with |{gamma n}| < epsilon. Candidates are seeded from the
/// CF convergent denominators, then the whole window is exhaustively
/// scanned for certification. Throws std::runtime_error when the window
/// holds no member.
AlmostPeriodSet almost_periods(double gamma, double epsilon, double window);

/// Almost-periods of the two-frequency torus flow with periods t1, t2,
/// scanning the uniform tau-grid of the given step:
/// sqrt({tau/t1}^2 + {tau/t2}^2) < epsilon.
AlmostPeriodSet almost_periods_torus_flow(double t1, double t2, double epsilon,
                                          double window, double step);

struct DensityCheck {
    bool ok = false;
    double certified_length = 0.0;  // max observed gap, window ends included
    double offending_lo = 0.0;      // interval free of members, on failure
    double offending_hi = 0.0;
};

/// Recompute the inclusion length from scratch; success iff every
/// subinterval of the window of length `claimed` contains a member.
DensityCheck verify_relative_density(const AlmostPeriodSet& set, double claimed);
DensityCheck verify_relative_density(const AlmostPeriodSet& set);

}  // namespace rds::dio

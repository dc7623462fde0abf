#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rds/systems.hpp"

namespace rds::measures {

/// Test-function class bounds: |g| <= sup_bound, Lip(g) <= lip_constant.
struct BLConfig {
    double sup_bound = 1.0;
    double lip_constant = 1.0;
};

enum class LpStatus { solved, degenerate };

struct BLResult {
    double distance = 0.0;
    /// Deduplicated union support the optimizer lives on.
    std::vector<systems::StatePoint> support;
    /// Optimal test function g at each support point.
    std::vector<double> optimizer_values;
    LpStatus status = LpStatus::solved;
    /// True when the exact chain solver handled the instance (metrically
    /// collinear support); false when the dense simplex did.
    bool chain_path = false;
};

using Metric = std::function<double(const systems::StatePoint&, const systems::StatePoint&)>;

/// Finite-support measure on the phase space; weights sum to 1 within 1e-12.
struct EmpiricalMeasure {
    std::vector<systems::StatePoint> support;
    std::vector<double> weights;
    std::optional<std::uint64_t> provenance_seed;
};

EmpiricalMeasure uniform_measure(std::vector<systems::StatePoint> support,
                                 std::optional<std::uint64_t> provenance = std::nullopt);
void validate_measure(const EmpiricalMeasure& mu);

/// delta-factorized measure on Omega x X: one point per omega id.
struct FactorizedMeasure {
    std::vector<std::uint64_t> omega_ids;
    std::vector<systems::StatePoint> points;
};

/// Solver selection: automatic dispatch, or a forced route for
/// cross-validation.
enum class Solver { automatic, chain, simplex };

/// Bounded-Lipschitz distance sup { mu(g) - nu(g) } over the finite union
/// support: a linear program with box constraints |g| <= sup_bound and
/// pair constraints |g_k - g_l| <= lip_constant * d(p_k, p_l). Solved by a
/// bundled dense simplex behind violated-constraint generation (the
/// triangle-redundant pairs never enter); metrically collinear supports
/// take an exact concave-chain route instead and the two agree to 1e-9.
BLResult bl_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const BLConfig& cfg,
                     const Metric& metric, Solver solver = Solver::automatic);

/// rho on Omega x X for delta-factorized measures with a common omega
/// sample: (1/N) sum min(2 sup_bound, lip_constant * d(x_i, y_i)), the
/// per-omega two-point optimum glued across the sample.
double bl_distance_factorized(const FactorizedMeasure& mu, const FactorizedMeasure& nu,
                              const BLConfig& cfg, const Metric& metric);

struct BootstrapBand {
    double lo = 0.0;   // 2.5 percentile
    double hi = 0.0;   // 97.5 percentile
    int resamples = 0;
};

/// Seeded bootstrap of bl_distance under joint resampling of the two
/// supports (matched indices when sizes agree).
BootstrapBand bootstrap_bl_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                    const BLConfig& cfg, const Metric& metric, int resamples,
                                    std::uint64_t seed);

namespace detail {

/// max c.x subject to A x <= rhs (rhs >= 0), x >= 0. Dense tableau,
/// Dantzig pricing with a Bland fallback against cycling.
struct SimplexSolution {
    std::vector<double> x;
    double objective = 0.0;
    bool degenerate = false;
};

SimplexSolution simplex_maximize(const std::vector<double>& c,
                                 const std::vector<std::vector<double>>& rows,
                                 const std::vector<double>& rhs);

/// Exact maximizer of sum c_k g_k over the chain |g_{k+1} - g_k| <= a_k,
/// |g_k| <= cap; returns the optimum and a maximizing g.
struct ChainSolution {
    double objective = 0.0;
    std::vector<double> g;
};

ChainSolution chain_maximize(const std::vector<double>& coeffs, const std::vector<double>& gaps,
                             double cap);

}  // namespace detail

}  // namespace rds::measures

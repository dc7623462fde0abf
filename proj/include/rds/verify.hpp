#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "rds/diophantine.hpp"
#include "rds/noise.hpp"
#include "rds/systems.hpp"

namespace rds::verify {

struct WorstCase {
    double t = 0.0;
    double s = 0.0;
    std::uint64_t seed = 0;
    int path_index = -1;
    int state_index = -1;
};

struct ResidualReport {
    double sup_residual = 0.0;
    double mean_residual = 0.0;
    long n_samples = 0;
    double grid_step = 0.0;
    double grid_half_range = 0.0;
    WorstCase worst;
};

/// The declared sample policy for the sup over (t, s, omega, x): every
/// sampled tuple is checked and the worst one reported.
struct SampleMatrix {
    std::vector<double> s_values;
    std::vector<double> t_values;
    std::vector<systems::StatePoint> states;
};

/// 8 s-values x 8 t-values x 4 states, states keyed to the system kind.
/// Times are dyadic multiples of time_scale; pass the grid base so they
/// stay grid-exact.
SampleMatrix default_matrix(const systems::SystemDescriptor& desc, double time_scale = 1.0);

/// Cocycle law residual d(Phi(t+s,w)x, Phi(t,theta_s w) Phi(s,w) x).
ResidualReport check_cocycle(const systems::SystemDescriptor& desc,
                             const noise::NoiseEnsemble& ensemble, const SampleMatrix& matrix);

/// Stationarity residual d(Phi(t,w) y(w), y(theta_t w)) where y(w) is the
/// section at time 0.
ResidualReport check_stationary(const systems::SystemDescriptor& desc,
                                const systems::SolutionSection& section,
                                const noise::NoiseEnsemble& ensemble,
                                const std::vector<double>& times);

struct PeriodicReport {
    ResidualReport flow;   // d(Phi(t,theta_s w) ytilde(s,w), ytilde(t+s,w))
    ResidualReport shift;  // d(ytilde(s+tau,w), ytilde(s,theta_tau w))
    double tau = 0.0;
};

PeriodicReport check_random_periodic(const systems::SystemDescriptor& desc,
                                     const systems::SolutionSection& section, double tau,
                                     const noise::NoiseEnsemble& ensemble,
                                     const std::vector<double>& s_values,
                                     const std::vector<double>& t_values);

struct RapCertificate {
    double epsilon = 0.0;
    dio::AlmostPeriodSet tau_set;
    double sup_deviation = 0.0;
    std::vector<double> per_tau;  // measured sup deviation per tau
    double worst_tau = 0.0;
    ResidualReport flow;
    bool density_ok = false;
    bool passed = false;  // sup_deviation < epsilon and density certified
};

/// Almost-periodicity of a section: flow residual plus the deviation
/// sup over (s, tau_k, omega) of d(H(s+tau_k, w), H(s, theta_tau_k w)).
RapCertificate check_rap(const systems::SystemDescriptor& desc,
                         const systems::SolutionSection& section, double epsilon,
                         const dio::AlmostPeriodSet& tau_set, const noise::NoiseEnsemble& ensemble,
                         const std::vector<double>& s_values,
                         const std::vector<double>& t_values);

struct LipschitzEstimate {
    double value = 0.0;
    WorstCase worst;
    long n_pairs = 0;
};

/// Max over samples of d(Phi(t,w)x, Phi(t,w)y) / d(x,y); coincident pairs
/// are skipped.
LipschitzEstimate estimate_lipschitz(
    const systems::SystemDescriptor& desc, const noise::NoiseEnsemble& ensemble,
    const std::vector<double>& times,
    const std::vector<std::pair<systems::StatePoint, systems::StatePoint>>& pairs);

struct Thm45Report {
    ResidualReport condition_backward;  // d(H0(w), Phi(tau, theta_-tau w) H0(theta_-tau w))
    ResidualReport condition_forward;   // d(H(s+tau, w), H(s, theta_tau w)),  H(t,w) = Phi(t,w)H0(w)
    double lipschitz = 0.0;
    double conclusion_sup = 0.0;  // sup d(H(s+tau, theta_-tau w), H(s, w))
    double bound = 0.0;           // lipschitz * epsilon
    bool passed = false;
};

/// The backward-shift condition and the conclusion bound; the forward form
/// is measured separately because the two are pathwise inequivalent.
Thm45Report check_thm45_condition(const systems::SystemDescriptor& desc,
                                  const std::function<systems::StatePoint(const noise::BrownianPath&)>& h0,
                                  const dio::AlmostPeriodSet& tau_set, double epsilon,
                                  const noise::NoiseEnsemble& ensemble,
                                  const std::vector<double>& s_values);

struct Thm43Report {
    double deterministic_sup = 0.0;  // torus-factor deviation, must be < eps/sqrt(2)
    double random_sup = 0.0;         // g-factor deviation, must be < eps/sqrt(2)
    double combined_sup = 0.0;       // full product metric, must be < eps
    bool deterministic_ok = false;
    bool random_ok = false;
    bool combined_ok = false;
    bool passed = false;
    std::optional<double> violating_tau;
};

/// Hypotheses and conclusion of the product construction, measured on the
/// product reference section.
Thm43Report check_thm43(const systems::SystemDescriptor& product_desc, double epsilon,
                        const dio::AlmostPeriodSet& tau_set, const noise::NoiseEnsemble& ensemble,
                        const std::vector<double>& t_values);

/// One row per dyadic level of a scheme-convergence study: the coarse-grid
/// evaluation measured against a fine-grid reference on the same
/// realizations. At a shared grid the catalog identities telescope to
/// round-off, so this mixed-fidelity residual is what actually carries the
/// O(h) signal.
struct ConvergenceStudy {
    std::vector<int> levels;   // h = base / 2^level
    std::vector<double> sup;
    std::vector<double> mean;
    double slope = 0.0;  // least-squares slope of log2(mean) vs log2(h)
};

ConvergenceStudy cocycle_convergence_study(const systems::SystemDescriptor& desc,
                                           const noise::NoiseEnsemble& fine_ensemble,
                                           const SampleMatrix& matrix,
                                           const std::vector<int>& levels);

ConvergenceStudy stationary_convergence_study(const systems::SystemDescriptor& desc,
                                              const systems::SolutionSection& fine_section,
                                              const noise::NoiseEnsemble& fine_ensemble,
                                              const std::vector<double>& times,
                                              const std::vector<int>& levels);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rds::verify

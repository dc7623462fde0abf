#include "rds/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rds::measures {

using noise::BrownianPath;
using noise::NoiseEnsemble;
using systems::StatePoint;
using systems::SystemDescriptor;

std::pair<BrownianPath, StatePoint> skew_apply(double t, const BrownianPath& omega,
                                               const StatePoint& x, const SystemDescriptor& desc) {
    return {noise::wiener_shift(omega, t), systems::apply_cocycle(desc, t, omega, x)};
}

EmpiricalMeasure lambda_t(const SystemDescriptor& desc, const systems::SolutionSection& section,
                          double t, const NoiseEnsemble& ensemble) {
    (void)desc;
    std::vector<StatePoint> support;
    support.reserve(static_cast<std::size_t>(ensemble.size()));
    for (int i = 0; i < ensemble.size(); ++i) {
        const auto back = noise::wiener_shift(ensemble.path(i), -t);
        support.push_back(section.eval(t, back));
    }
    return uniform_measure(std::move(support), ensemble.master_seed());
}

double mu_eval(const std::function<double(const BrownianPath&, const StatePoint&)>& f,
               const SystemDescriptor& desc, const systems::SolutionSection& section, double t,
               const NoiseEnsemble& ensemble) {
    (void)desc;
    double acc = 0.0;
    for (int i = 0; i < ensemble.size(); ++i) {
        const auto path = ensemble.path(i);
        acc += f(noise::wiener_shift(path, t), section.eval(t, path));
    }
    return acc / static_cast<double>(ensemble.size());
}

FactorizedMeasure mu_factorized(const SystemDescriptor& desc,
                                const systems::SolutionSection& section, double t,
                                const NoiseEnsemble& ensemble) {
    (void)desc;
    FactorizedMeasure out;
    out.omega_ids.reserve(static_cast<std::size_t>(ensemble.size()));
    out.points.reserve(static_cast<std::size_t>(ensemble.size()));
    for (int i = 0; i < ensemble.size(); ++i) {
        out.omega_ids.push_back(ensemble.seed(i));
        const auto back = noise::wiener_shift(ensemble.path(i), -t);
        out.points.push_back(section.eval(t, back));
    }
    return out;
}

EmpiricalMeasure push_forward_kernel(const SystemDescriptor& desc, double t,
                                     const EmpiricalMeasure& mu, const NoiseEnsemble& fresh) {
    validate_measure(mu);
    if (mu.provenance_seed && *mu.provenance_seed == fresh.master_seed()) {
        throw std::invalid_argument(
            "push_forward_kernel: fresh ensemble shares the measure's seed (independence)");
    }
    if (t == 0.0) {
        EmpiricalMeasure out = mu;  // Phi(0) = id, the product weights merge back
        out.provenance_seed = fresh.master_seed();
        return out;
    }
    EmpiricalMeasure out;
    const std::size_t m = mu.support.size();
    const std::size_t n_fresh = static_cast<std::size_t>(fresh.size());
    if (n_fresh == m) {
        // paired Monte-Carlo draw: one fresh path per atom
        out.support.reserve(m);
        out.weights = mu.weights;
        for (std::size_t i = 0; i < m; ++i) {
            out.support.push_back(
                systems::apply_cocycle(desc, t, fresh.path(static_cast<int>(i)), mu.support[i]));
        }
    } else {
        out.support.reserve(m * n_fresh);
        out.weights.reserve(m * n_fresh);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n_fresh; ++j) {
                out.support.push_back(
                    systems::apply_cocycle(desc, t, fresh.path(static_cast<int>(j)), mu.support[i]));
                out.weights.push_back(mu.weights[i] / static_cast<double>(n_fresh));
            }
        }
    }
    out.provenance_seed = fresh.master_seed();
    return out;
}

Metric phase_metric_for(const SystemDescriptor& desc) {
    return [desc](const StatePoint& a, const StatePoint& b) {
        return systems::phase_metric(desc, a, b);
    };
}

ApMeasureCertificate check_ap_measure(const SystemDescriptor& desc,
                                      const systems::SolutionSection& section, double epsilon,
                                      const dio::AlmostPeriodSet& tau_set,
                                      const std::vector<double>& s_values,
                                      const std::vector<double>& t_values,
                                      const NoiseEnsemble& ensemble, const NoiseEnsemble& fresh,
                                      const BLConfig& phase_cfg, const BLConfig& skew_cfg,
                                      int bootstrap_resamples) {
    if (tau_set.taus.empty()) throw std::invalid_argument("check_ap_measure: empty tau set");
    ApMeasureCertificate cert;
    cert.epsilon = epsilon;
    cert.phase_cfg = phase_cfg;
    cert.skew_cfg = skew_cfg;
    const auto metric = phase_metric_for(desc);

    // (a) push-forward identity rho1(P_t* lambda_s, lambda_{t+s})
    for (double s : s_values) {
        const auto lam_s = lambda_t(desc, section, s, ensemble);
        for (double t : t_values) {
            if (t == 0.0) continue;
            const auto pushed = push_forward_kernel(desc, t, lam_s, fresh);
            const auto lam_ts = lambda_t(desc, section, t + s, ensemble);
            ApFamilyEntry e;
            e.t = t;
            e.s = s;
            e.rho = bl_distance(pushed, lam_ts, phase_cfg, metric).distance;
            cert.push_forward.push_back(e);
        }
    }

    // (b) rho1(lambda_{s+tau}, lambda_s) <= C2 * epsilon + margin
    const double phase_bound = phase_cfg.lip_constant * epsilon;
    double worst_rho = -1.0;
    EmpiricalMeasure worst_a, worst_b;
    for (double s : s_values) {
        const auto lam_s = lambda_t(desc, section, s, ensemble);
        for (double tau : tau_set.taus) {
            if (tau == 0.0) continue;
            const auto lam_stau = lambda_t(desc, section, s + tau, ensemble);
            ApFamilyEntry e;
            e.s = s;
            e.tau = tau;
            e.rho = bl_distance(lam_stau, lam_s, phase_cfg, metric).distance;
            cert.phase_shift.push_back(e);
            if (e.rho > worst_rho) {
                worst_rho = e.rho;
                worst_a = lam_stau;
                worst_b = lam_s;
            }
        }
    }
    if (worst_rho >= 0.0 && bootstrap_resamples > 0) {
        cert.worst_band = bootstrap_bl_distance(worst_a, worst_b, phase_cfg, metric,
                                                bootstrap_resamples, 0x414243u);
        cert.bootstrap_margin = std::max(0.0, cert.worst_band.hi - worst_rho);
    }
    cert.passed_phase = true;
    for (const auto& e : cert.phase_shift) {
        if (e.rho > phase_bound + cert.bootstrap_margin) cert.passed_phase = false;
    }

    // (c) Omega x X analogue on matched seeds
    const double skew_bound = skew_cfg.lip_constant * epsilon;
    cert.passed_skew = true;
    for (double s : s_values) {
        const auto mu_s = mu_factorized(desc, section, s, ensemble);
        for (double tau : tau_set.taus) {
            if (tau == 0.0) continue;
            const auto mu_stau = mu_factorized(desc, section, s + tau, ensemble);
            ApFamilyEntry e;
            e.s = s;
            e.tau = tau;
            e.rho = bl_distance_factorized(mu_stau, mu_s, skew_cfg, metric);
            cert.skew_shift.push_back(e);
            if (e.rho > skew_bound + 1e-12) cert.passed_skew = false;
        }
    }

    cert.passed = cert.passed_phase && cert.passed_skew;
    return cert;
}

}  // namespace rds::measures

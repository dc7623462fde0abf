#include "rds/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rds::verify {

using noise::BrownianPath;
using noise::NoiseEnsemble;
using systems::StatePoint;
using systems::SystemDescriptor;

namespace {

struct Accumulator {
    double sup = 0.0;
    double sum = 0.0;
    long n = 0;
    WorstCase worst;

    void add(double r, double t, double s, int path_index, std::uint64_t seed, int state_index) {
        if (!std::isfinite(r)) throw std::runtime_error("verify: non-finite residual");
        sum += r;
        ++n;
        if (r > sup) {
            sup = r;
            worst = WorstCase{t, s, seed, path_index, state_index};
        }
    }

    ResidualReport report(const noise::TimeGrid& grid) const {
        ResidualReport rep;
        rep.sup_residual = sup;
        rep.mean_residual = n > 0 ? sum / static_cast<double>(n) : 0.0;
        rep.n_samples = n;
        rep.grid_step = grid.step();
        rep.grid_half_range = grid.half_range();
        rep.worst = worst;
        return rep;
    }
};

std::vector<double> scaled(std::initializer_list<double> units, double base) {
    std::vector<double> out;
    for (double u : units) out.push_back(u * base);
    return out;
}

StatePoint perturbed(const StatePoint& p) {
    if (const auto* r = std::get_if<systems::RealPoint>(&p)) {
        return systems::real_point(r->x + 0.5);
    }
    if (const auto* c = std::get_if<systems::CylPoint>(&p)) {
        return systems::cyl_point(c->alpha + 0.125, c->rho + 0.5);
    }
    if (const auto* t = std::get_if<systems::TorusPoint>(&p)) {
        return systems::torus_point(t->r + 0.5, t->alpha + 0.125, t->z);
    }
    const auto& q = std::get<systems::ProductPoint>(p);
    return systems::product_point(q.x, q.y, q.z + 0.5);
}

}  // namespace

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("least_squares_slope: need two samples");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SampleMatrix default_matrix(const SystemDescriptor& desc, double time_scale) {
    SampleMatrix m;
    m.s_values = scaled({0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0}, time_scale);
    m.t_values = m.s_values;
    switch (desc.kind) {
        case systems::Kind::ou:
            m.states = {systems::real_point(-2.0), systems::real_point(-0.5),
                        systems::real_point(0.5), systems::real_point(2.0)};
            break;
        case systems::Kind::pitchfork:
            m.states = {systems::real_point(0.25), systems::real_point(0.5),
                        systems::real_point(1.0), systems::real_point(2.0)};
            break;
        case systems::Kind::cylinder:
            m.states = {systems::cyl_point(0.0, 0.5), systems::cyl_point(0.3, 1.0),
                        systems::cyl_point(-0.2, 1.5), systems::cyl_point(0.45, 2.0)};
            break;
        case systems::Kind::torus:
            m.states = {systems::torus_point(0.5, 0.0, 0.0), systems::torus_point(1.0, 0.3, -0.1),
                        systems::torus_point(1.5, -0.2, 0.4), systems::torus_point(2.0, 0.45, 0.2)};
            break;
        case systems::Kind::product:
            m.states = {systems::product_point(0.0, 0.0, 0.5), systems::product_point(0.3, -0.1, -0.5),
                        systems::product_point(-0.2, 0.4, 1.0), systems::product_point(0.45, 0.2, 0.0)};
            break;
    }
    return m;
}

ResidualReport check_cocycle(const SystemDescriptor& desc, const NoiseEnsemble& ensemble,
                             const SampleMatrix& matrix) {
    Accumulator acc;
    for (int i = 0; i < ensemble.size(); ++i) {
        const auto path = ensemble.path(i);
        for (double s : matrix.s_values) {
            const auto shifted = noise::wiener_shift(path, s);
            for (double t : matrix.t_values) {
                for (std::size_t xi = 0; xi < matrix.states.size(); ++xi) {
                    const auto& x = matrix.states[xi];
                    const auto lhs = systems::apply_cocycle(desc, t + s, path, x);
                    const auto mid = systems::apply_cocycle(desc, s, path, x);
                    const auto rhs = systems::apply_cocycle(desc, t, shifted, mid);
                    acc.add(systems::phase_metric(desc, lhs, rhs), t, s, i, ensemble.seed(i),
                            static_cast<int>(xi));
                }
            }
        }
    }
    return acc.report(ensemble.grid());
}

ResidualReport check_stationary(const SystemDescriptor& desc,
                                const systems::SolutionSection& section,
                                const NoiseEnsemble& ensemble, const std::vector<double>& times) {
    Accumulator acc;
    for (int i = 0; i < ensemble.size(); ++i) {
        const auto path = ensemble.path(i);
        const auto y0 = section.eval(0.0, path);
        for (double t : times) {
            const auto lhs = systems::apply_cocycle(desc, t, path, y0);
            const auto rhs = section.eval(0.0, noise::wiener_shift(path, t));
            acc.add(systems::phase_metric(desc, lhs, rhs), t, 0.0, i, ensemble.seed(i), -1);
        }
    }
    return acc.report(ensemble.grid());
}

PeriodicReport check_random_periodic(const SystemDescriptor& desc,
                                     const systems::SolutionSection& section, double tau,
                                     const NoiseEnsemble& ensemble,
                                     const std::vector<double>& s_values,
                                     const std::vector<double>& t_values) {
    PeriodicReport rep;
    rep.tau = tau;
    Accumulator flow;
    Accumulator shift;
    for (int i = 0; i < ensemble.size(); ++i) {
        const auto path = ensemble.path(i);
        for (double s : s_values) {
            const auto ys = section.eval(s, path);
            const auto shifted_s = noise::wiener_shift(path, s);
            for (double t : t_values) {
                const auto lhs = systems::apply_cocycle(desc, t, shifted_s, ys);
                const auto rhs = section.eval(t + s, path);
                flow.add(systems::phase_metric(desc, lhs, rhs), t, s, i, ensemble.seed(i), -1);
            }
            const auto a = section.eval(s + tau, path);
            const auto b = section.eval(s, noise::wiener_shift(path, tau));
            shift.add(systems::phase_metric(desc, a, b), tau, s, i, ensemble.seed(i), -1);
        }
    }
    rep.flow = flow.report(ensemble.grid());
    rep.shift = shift.report(ensemble.grid());
    return rep;
}

RapCertificate check_rap(const SystemDescriptor& desc, const systems::SolutionSection& section,
                         double epsilon, const dio::AlmostPeriodSet& tau_set,
                         const NoiseEnsemble& ensemble, const std::vector<double>& s_values,
                         const std::vector<double>& t_values) {
    if (tau_set.taus.empty()) throw std::invalid_argument("check_rap: empty tau set");
    RapCertificate cert;
    cert.epsilon = epsilon;
    cert.tau_set = tau_set;
    cert.per_tau.assign(tau_set.taus.size(), 0.0);

    Accumulator flow;
    for (int i = 0; i < ensemble.size(); ++i) {
        const auto path = ensemble.path(i);
        for (double s : s_values) {
            const auto ys = section.eval(s, path);
            const auto shifted_s = noise::wiener_shift(path, s);
            for (double t : t_values) {
                const auto lhs = systems::apply_cocycle(desc, t, shifted_s, ys);
                const auto rhs = section.eval(t + s, path);
                flow.add(systems::phase_metric(desc, lhs, rhs), t, s, i, ensemble.seed(i), -1);
            }
        }
        for (std::size_t k = 0; k < tau_set.taus.size(); ++k) {
            const double tau = tau_set.taus[k];
            const auto shifted_tau = noise::wiener_shift(path, tau);
            for (double s : s_values) {
                const auto a = section.eval(s + tau, path);
                const auto b = section.eval(s, shifted_tau);
                const double d = systems::phase_metric(desc, a, b);
                cert.per_tau[k] = std::max(cert.per_tau[k], d);
                if (d > cert.sup_deviation) {
                    cert.sup_deviation = d;
                    cert.worst_tau = tau;
                }
            }
        }
    }
    cert.flow = flow.report(ensemble.grid());
    cert.density_ok = dio::verify_relative_density(tau_set).ok;
    cert.passed = cert.density_ok && cert.sup_deviation < epsilon;
    return cert;
}

LipschitzEstimate estimate_lipschitz(
    const SystemDescriptor& desc, const NoiseEnsemble& ensemble, const std::vector<double>& times,
    const std::vector<std::pair<StatePoint, StatePoint>>& pairs) {
    LipschitzEstimate est;
    for (int i = 0; i < ensemble.size(); ++i) {
        const auto path = ensemble.path(i);
        for (double t : times) {
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                const double dxy = systems::phase_metric(desc, pairs[k].first, pairs[k].second);
                if (dxy == 0.0) continue;  // coincident pair, skipped
                const auto fx = systems::apply_cocycle(desc, t, path, pairs[k].first);
                const auto fy = systems::apply_cocycle(desc, t, path, pairs[k].second);
                const double ratio = systems::phase_metric(desc, fx, fy) / dxy;
                ++est.n_pairs;
                if (ratio > est.value) {
                    est.value = ratio;
                    est.worst = WorstCase{t, 0.0, ensemble.seed(i), i, static_cast<int>(k)};
                }
            }
        }
    }
    return est;
}

Thm45Report check_thm45_condition(
    const SystemDescriptor& desc,
    const std::function<StatePoint(const BrownianPath&)>& h0,
    const dio::AlmostPeriodSet& tau_set, double epsilon, const NoiseEnsemble& ensemble,
    const std::vector<double>& s_values) {
    if (tau_set.taus.empty()) throw std::invalid_argument("check_thm45_condition: empty tau set");
    Thm45Report rep;
    Accumulator backward;
    Accumulator forward;
    Accumulator conclusion;

    for (int i = 0; i < ensemble.size(); ++i) {
        const auto path = ensemble.path(i);
        const auto h0_here = h0(path);
        for (double tau : tau_set.taus) {
            const auto back = noise::wiener_shift(path, -tau);
            // condition, backward-shift form
            const auto transported = systems::apply_cocycle(desc, tau, back, h0(back));
            backward.add(systems::phase_metric(desc, h0_here, transported), tau, 0.0, i,
                         ensemble.seed(i), -1);
            // forward form on H(t, w) = Phi(t, w) H0(w)
            const auto shifted = noise::wiener_shift(path, tau);
            const auto h0_shifted = h0(shifted);
            for (double s : s_values) {
                const auto a = systems::apply_cocycle(desc, s + tau, path, h0_here);
                const auto b = systems::apply_cocycle(desc, s, shifted, h0_shifted);
                forward.add(systems::phase_metric(desc, a, b), tau, s, i, ensemble.seed(i), -1);
                // conclusion deviation d(H(s+tau, theta_-tau w), H(s, w))
                const auto c = systems::apply_cocycle(desc, s + tau, back, h0(back));
                const auto d = systems::apply_cocycle(desc, s, path, h0_here);
                conclusion.add(systems::phase_metric(desc, c, d), tau, s, i, ensemble.seed(i), -1);
            }
        }
    }
    rep.condition_backward = backward.report(ensemble.grid());
    rep.condition_forward = forward.report(ensemble.grid());
    rep.conclusion_sup = conclusion.sup;

    // Lipschitz constant over the sampled section values, perturbed copies
    // included so a constant section still yields separated pairs.
    std::vector<std::pair<StatePoint, StatePoint>> pairs;
    std::vector<StatePoint> values;
    for (int i = 0; i < std::min(ensemble.size(), 8); ++i) {
        values.push_back(h0(ensemble.path(i)));
    }
    for (std::size_t i = 0; i + 1 < values.size(); ++i) pairs.emplace_back(values[i], values[i + 1]);
    for (const auto& v : values) pairs.emplace_back(v, perturbed(v));
    const auto lip = estimate_lipschitz(desc, ensemble, s_values, pairs);
    rep.lipschitz = lip.value;
    rep.bound = lip.value * epsilon;
    rep.passed = rep.condition_backward.sup_residual < epsilon &&
                 rep.conclusion_sup <= rep.bound + 1e-12;
    return rep;
}

Thm43Report check_thm43(const SystemDescriptor& product_desc, double epsilon,
                        const dio::AlmostPeriodSet& tau_set, const NoiseEnsemble& ensemble,
                        const std::vector<double>& t_values) {
    if (product_desc.kind != systems::Kind::product) {
        throw std::invalid_argument("check_thm43: needs a product system");
    }
    if (tau_set.taus.empty()) throw std::invalid_argument("check_thm43: empty tau set");
    Thm43Report rep;
    const double half_bound = epsilon / std::sqrt(2.0);
    const auto section = systems::reference_section(product_desc);

    // deterministic torus factor: no omega dependence
    for (double tau : tau_set.taus) {
        const double dx = systems::frac_nearest(tau / product_desc.t1);
        const double dy = systems::frac_nearest(tau / product_desc.t2);
        const double dev = std::sqrt(dx * dx + dy * dy);
        if (dev > rep.deterministic_sup) rep.deterministic_sup = dev;
        if (dev >= half_bound && !rep.violating_tau) rep.violating_tau = tau;
    }

    for (int i = 0; i < ensemble.size(); ++i) {
        const auto path = ensemble.path(i);
        for (double tau : tau_set.taus) {
            const auto shifted = noise::wiener_shift(path, tau);
            for (double t : t_values) {
                const auto a = section.eval(t + tau, path);
                const auto b = section.eval(t, shifted);
                const double gz =
                    std::abs(std::get<systems::ProductPoint>(a).z - std::get<systems::ProductPoint>(b).z);
                rep.random_sup = std::max(rep.random_sup, gz);
                rep.combined_sup =
                    std::max(rep.combined_sup, systems::phase_metric(product_desc, a, b));
            }
        }
    }
    rep.deterministic_ok = rep.deterministic_sup < half_bound;
    rep.random_ok = rep.random_sup < half_bound;
    rep.combined_ok = rep.combined_sup < epsilon;
    rep.passed = rep.deterministic_ok && rep.random_ok && rep.combined_ok;
    return rep;
}

ConvergenceStudy cocycle_convergence_study(const SystemDescriptor& desc,
                                           const NoiseEnsemble& fine_ensemble,
                                           const SampleMatrix& matrix,
                                           const std::vector<int>& levels) {
    ConvergenceStudy study;
    const int fine_level = fine_ensemble.grid().level();
    std::vector<double> log_h, log_mean;
    for (int level : levels) {
        if (level >= fine_level) {
            throw std::invalid_argument("cocycle_convergence_study: level must be coarser than fine grid");
        }
        Accumulator acc;
        for (int i = 0; i < fine_ensemble.size(); ++i) {
            const auto fine = fine_ensemble.path(i);
            const auto coarse = fine.coarsened(1L << (fine_level - level));
            for (double s : matrix.s_values) {
                const auto shifted = noise::wiener_shift(coarse, s);
                for (double t : matrix.t_values) {
                    for (std::size_t xi = 0; xi < matrix.states.size(); ++xi) {
                        const auto& x = matrix.states[xi];
                        const auto lhs = systems::apply_cocycle(desc, t + s, fine, x);
                        const auto mid = systems::apply_cocycle(desc, s, coarse, x);
                        const auto rhs = systems::apply_cocycle(desc, t, shifted, mid);
                        acc.add(systems::phase_metric(desc, lhs, rhs), t, s, i,
                                fine_ensemble.seed(i), static_cast<int>(xi));
                    }
                }
            }
        }
        study.levels.push_back(level);
        study.sup.push_back(acc.sup);
        study.mean.push_back(acc.sum / static_cast<double>(acc.n));
        log_h.push_back(-static_cast<double>(level));
        log_mean.push_back(std::log2(study.mean.back()));
    }
    study.slope = least_squares_slope(log_h, log_mean);
    return study;
}

ConvergenceStudy stationary_convergence_study(const SystemDescriptor& desc,
                                              const systems::SolutionSection& fine_section,
                                              const NoiseEnsemble& fine_ensemble,
                                              const std::vector<double>& times,
                                              const std::vector<int>& levels) {
    ConvergenceStudy study;
    const int fine_level = fine_ensemble.grid().level();
    std::vector<double> log_h, log_mean;
    for (int level : levels) {
        if (level >= fine_level) {
            throw std::invalid_argument(
                "stationary_convergence_study: level must be coarser than fine grid");
        }
        Accumulator acc;
        for (int i = 0; i < fine_ensemble.size(); ++i) {
            const auto fine = fine_ensemble.path(i);
            const auto coarse = fine.coarsened(1L << (fine_level - level));
            const auto y0 = fine_section.eval(0.0, fine);
            for (double t : times) {
                const auto lhs = systems::apply_cocycle(desc, t, coarse, y0);
                const auto rhs = fine_section.eval(t, fine);
                acc.add(systems::phase_metric(desc, lhs, rhs), t, 0.0, i, fine_ensemble.seed(i), -1);
            }
        }
        study.levels.push_back(level);
        study.sup.push_back(acc.sup);
        study.mean.push_back(acc.sum / static_cast<double>(acc.n));
        log_h.push_back(-static_cast<double>(level));
        log_mean.push_back(std::log2(study.mean.back()));
    }
    study.slope = least_squares_slope(log_h, log_mean);
    return study;
}

}  // namespace rds::verify

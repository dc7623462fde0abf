#include "rds/sde.hpp"

#include <algorithm>
#include <cmath>

#include "rds/verify.hpp"

namespace rds::sde {

namespace {

SdeSpec with_correction(const SdeSpec& spec, double sign, Convention target) {
    if (!spec.diffusion_jacobian) {
        throw std::invalid_argument("convention change needs the diffusion Jacobian");
    }
    SdeSpec out = spec;
    out.convention = target;
    out.drift = [drift = spec.drift, sigma = spec.diffusion, jac = spec.diffusion_jacobian,
                 sign](const Vec& x) {
        Vec b = drift(x);
        const Vec s = sigma(x);
        const auto J = jac(x);
        for (std::size_t i = 0; i < b.size(); ++i) {
            double corr = 0.0;
            for (std::size_t j = 0; j < s.size(); ++j) corr += J[i][j] * s[j];
            b[i] += sign * 0.5 * corr;
        }
        return b;
    };
    return out;
}

}  // namespace

SdeSpec stratonovich_to_ito(const SdeSpec& spec) {
    if (spec.convention != Convention::stratonovich) {
        throw std::invalid_argument("stratonovich_to_ito: spec is already Ito");
    }
    return with_correction(spec, +1.0, Convention::ito);
}

SdeSpec ito_to_stratonovich(const SdeSpec& spec) {
    if (spec.convention != Convention::ito) {
        throw std::invalid_argument("ito_to_stratonovich: spec is already Stratonovich");
    }
    return with_correction(spec, -1.0, Convention::stratonovich);
}

Trajectory euler_maruyama(const SdeSpec& spec, const Vec& x0, const noise::BrownianPath& path,
                          double t_end, int substeps) {
    if (substeps < 1) throw std::invalid_argument("euler_maruyama: substeps must be >= 1");
    if (static_cast<int>(x0.size()) != spec.dim) {
        throw std::invalid_argument("euler_maruyama: state dimension mismatch");
    }
    const auto k_end = path.grid().index_of(t_end);
    if (!k_end || *k_end < 0 || *k_end > path.max_index()) {
        throw std::invalid_argument("euler_maruyama: t_end must be a grid point in the domain");
    }
    const SdeSpec ito =
        spec.convention == Convention::stratonovich ? stratonovich_to_ito(spec) : spec;

    const double h = path.grid().step();
    const double dt = h / static_cast<double>(substeps);
    const long n_steps = *k_end * substeps;

    Trajectory traj;
    traj.substeps = substeps;
    traj.times.reserve(static_cast<std::size_t>(n_steps + 1));
    traj.states.reserve(static_cast<std::size_t>(n_steps + 1));

    Vec x = x0;
    double b_prev = path.value_at_index(0);
    traj.times.push_back(0.0);
    traj.states.push_back(x);
    for (long i = 0; i < n_steps; ++i) {
        const double t_next = (substeps == 1) ? static_cast<double>(i + 1) * h
                                              : static_cast<double>(i + 1) * dt;
        const double b_next = (substeps == 1) ? path.value_at_index(i + 1)
                                              : noise::evaluate(path, t_next);
        const double db = b_next - b_prev;
        const Vec drift = ito.drift(x);
        const Vec diff = ito.diffusion(x);
        for (std::size_t d = 0; d < x.size(); ++d) {
            x[d] += drift[d] * dt + diff[d] * db;
            if (!(std::abs(x[d]) <= 1e12)) {
                throw DivergenceError(i, "euler_maruyama: state blew up");
            }
        }
        b_prev = b_next;
        traj.times.push_back(t_next);
        traj.states.push_back(x);
    }
    return traj;
}

SdeSpec catalog_sde(const systems::SystemDescriptor& desc) {
    SdeSpec spec;
    spec.dim = 1;
    spec.convention = Convention::ito;
    switch (desc.kind) {
        case systems::Kind::ou:
            spec.drift = [](const Vec& x) { return Vec{-x[0]}; };
            spec.diffusion = [](const Vec&) { return Vec{1.0}; };
            spec.diffusion_jacobian = [](const Vec&) {
                return std::vector<Vec>{{0.0}};
            };
            return spec;
        case systems::Kind::pitchfork:
            spec.drift = [](const Vec& x) { return Vec{1.5 * x[0] - x[0] * x[0] * x[0]}; };
            spec.diffusion = [](const Vec& x) { return Vec{x[0]}; };
            spec.diffusion_jacobian = [](const Vec&) {
                return std::vector<Vec>{{1.0}};
            };
            return spec;
        default:
            throw std::invalid_argument("catalog_sde: scalar oracle exists for ou and pitchfork");
    }
}

SlopeReport strong_error_slope(const systems::SystemDescriptor& desc,
                               const noise::NoiseEnsemble& fine_ensemble,
                               const std::vector<int>& levels, double t_end, double x0) {
    if (levels.size() < 4) {
        throw std::invalid_argument("strong_error_slope: need at least 4 step sizes");
    }
    const auto spec = catalog_sde(desc);
    const int fine_level = fine_ensemble.grid().level();
    SlopeReport rep;
    std::vector<double> log_h, log_err;
    for (int level : levels) {
        if (level >= fine_level) {
            throw std::invalid_argument("strong_error_slope: level must be coarser than fine grid");
        }
        double err = 0.0;
        for (int i = 0; i < fine_ensemble.size(); ++i) {
            const auto fine = fine_ensemble.path(i);
            const auto coarse = fine.coarsened(1L << (fine_level - level));
            const auto traj = euler_maruyama(spec, Vec{x0}, coarse, t_end, 1);
            const auto closed =
                systems::apply_cocycle(desc, t_end, fine, systems::real_point(x0));
            err += std::abs(traj.states.back()[0] - std::get<systems::RealPoint>(closed).x);
        }
        err /= static_cast<double>(fine_ensemble.size());
        rep.levels.push_back(level);
        rep.h_values.push_back(std::ldexp(fine_ensemble.grid().base(), -level));
        rep.mean_errors.push_back(err);
        log_h.push_back(-static_cast<double>(level));
        log_err.push_back(std::log2(err));
    }
    for (std::size_t i = 0; i + 1 < rep.mean_errors.size(); ++i) {
        if (rep.mean_errors[i + 1] > rep.mean_errors[i]) rep.monotone = false;
    }
    rep.slope = verify::least_squares_slope(log_h, log_err);
    return rep;
}

}  // namespace rds::sde

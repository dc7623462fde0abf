#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "rds/noise.hpp"
#include "rds/systems.hpp"

namespace rds::sde {

using Vec = std::vector<double>;

enum class Convention { ito, stratonovich };

/// Scalar-noise SDE dX = b(X) dt + sigma(X) dB in either convention.
/// diffusion_jacobian is the matrix d sigma_i / d x_j, needed only when a
/// convention change is requested.
struct SdeSpec {
    int dim = 1;
    std::function<Vec(const Vec&)> drift;
    std::function<Vec(const Vec&)> diffusion;
    std::function<std::vector<Vec>(const Vec&)> diffusion_jacobian;
    Convention convention = Convention::ito;
};

/// drift' = drift + 1/2 (D sigma) sigma; the correction is applied exactly
/// once per conversion.
SdeSpec stratonovich_to_ito(const SdeSpec& spec);
/// drift' = drift - 1/2 (D sigma) sigma.
SdeSpec ito_to_stratonovich(const SdeSpec& spec);

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(long step, std::string what)
        : std::runtime_error(std::move(what)), step_index(step) {}
    long step_index;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    int substeps = 1;
};

/// Explicit Euler-Maruyama against the given driving path, integrator step
/// h/substeps. Brownian increments at scale h are exact; sub-h refinement
/// reads the path by linear interpolation and is approximate by
/// construction. Stratonovich specs are converted to Ito first. Divergence
/// (|x| > 1e12) raises DivergenceError with the step index.
Trajectory euler_maruyama(const SdeSpec& spec, const Vec& x0, const noise::BrownianPath& path,
                          double t_end, int substeps = 1);

/// Ito-form oracle specs for the scalar catalog systems (ou, pitchfork).
SdeSpec catalog_sde(const systems::SystemDescriptor& desc);

struct SlopeReport {
    double slope = 0.0;  // log2(mean error) vs log2(h)
    std::vector<int> levels;
    std::vector<double> h_values;
    std::vector<double> mean_errors;
    bool monotone = true;  // warning flag when the error sequence is not decreasing
};

/// Strong error of Euler-Maruyama at t_end against the closed-form cocycle
/// evaluated on the fine grid, over coarsenings of the same driving paths.
SlopeReport strong_error_slope(const systems::SystemDescriptor& desc,
                               const noise::NoiseEnsemble& fine_ensemble,
                               const std::vector<int>& levels, double t_end, double x0 = 1.0);

}  // namespace rds::sde

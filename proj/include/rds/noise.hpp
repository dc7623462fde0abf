#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rds::noise {

/// Thrown when an adaptive pullback integral cannot reach its tolerance
/// within the path's available domain. Carries the last two partial values
/// so the caller can judge how far off the truncation was.
class DomainExhaustedError : public std::runtime_error {
public:
    DomainExhaustedError(double previous, double last, std::string what)
        : std::runtime_error(std::move(what)), previous_partial(previous), last_partial(last) {}
    double previous_partial;
    double last_partial;
};

/// Uniform two-sided grid {k*h : |k*h| <= T}. The step h is a dyadic
/// fraction of a base period (base/2^level) so that the shifts the checks
/// rely on (2*pi turns, integer almost-periods) land exactly on grid
/// points and the shift identities stay bitwise.
class TimeGrid {
public:
    /// h = base / 2^level, T = half_steps * h.
    TimeGrid(double base, int level, long half_steps);

    double step() const { return h_; }
    double half_range() const { return half_range_; }
    double base() const { return base_; }
    int level() const { return level_; }
    long half_steps() const { return half_steps_; }

    double time_at(long k) const { return static_cast<double>(k) * h_; }

    /// Grid index of a grid-exact time; nullopt when t does not land
    /// bitwise on a grid point.
    std::optional<long> index_of(double t) const;

    bool operator==(const TimeGrid& other) const {
        return base_ == other.base_ && level_ == other.level_ && half_steps_ == other.half_steps_;
    }

private:
    double base_;
    int level_;
    long half_steps_;
    double h_;
    double half_range_;
};

/// A sampled two-sided Brownian trajectory. Shifting is exact: a shifted
/// path keeps a handle on the original realization plus an integer offset,
/// so B_s(theta_t omega) = B_{t+s}(omega) - B_t(omega) holds bitwise and
/// shift composition is associative at the bit level.
class BrownianPath {
public:
    const TimeGrid& grid() const { return data_->grid; }
    std::uint64_t seed() const { return data_->seed; }

    /// Accumulated shift (time units). 0 for freshly sampled paths.
    double origin_offset() const { return origin_offset_; }
    long shift_steps() const { return shift_; }
    /// True when the path was produced by an interpolating (non-grid) shift.
    bool interpolated() const { return interpolated_; }

    /// Admissible relative-time index range [min_index, max_index].
    long min_index() const { return -data_->grid.half_steps() - shift_; }
    long max_index() const { return data_->grid.half_steps() - shift_; }
    double min_time() const { return data_->grid.time_at(min_index()); }
    double max_time() const { return data_->grid.time_at(max_index()); }

    /// Exact value at relative grid index k.
    double value_at_index(long k) const;
    /// Exact value at a grid-exact relative time; throws otherwise.
    double value_at_time(double s) const;

    bool same_realization(const BrownianPath& other) const { return data_ == other.data_; }

    /// Subsample every `factor`-th grid point (factor a power of two times
    /// one). The result is a genuine Brownian path at step factor*h driven
    /// by the same realization; used by convergence studies.
    BrownianPath coarsened(long factor) const;

    friend BrownianPath sample_path(std::uint64_t seed, const TimeGrid& grid);
    friend BrownianPath zero_path(const TimeGrid& grid);
    friend BrownianPath wiener_shift(const BrownianPath& path, double t);
    friend BrownianPath wiener_shift_interpolated(const BrownianPath& path, double t);

private:
    struct Data {
        TimeGrid grid;
        std::vector<double> values;  // absolute values, slot i <-> index i - half_steps
        std::uint64_t seed;
    };

    BrownianPath(std::shared_ptr<const Data> data, long shift, double origin_offset, bool interpolated)
        : data_(std::move(data)), shift_(shift), origin_offset_(origin_offset), interpolated_(interpolated) {}

    std::shared_ptr<const Data> data_;
    long shift_;
    double origin_offset_;
    bool interpolated_;
};

/// B(0) = 0; forward values are cumulative N(0,h) increments from one
/// stream derived from `seed`, backward values from an independent stream.
/// Same seed, same grid -> bitwise identical path.
BrownianPath sample_path(std::uint64_t seed, const TimeGrid& grid);

/// The deterministic path omega == 0. Reduces every closed-form cocycle to
/// its zero-noise skeleton.
BrownianPath zero_path(const TimeGrid& grid);

/// Wiener shift theta_t, strict mode: t must be a grid multiple.
BrownianPath wiener_shift(const BrownianPath& path, double t);

/// Permissive shift: non-grid t is handled by linear interpolation and the
/// result is flagged interpolated(). Never silent, never the default.
BrownianPath wiener_shift_interpolated(const BrownianPath& path, double t);

/// Exact at grid points, linear interpolation in between.
double evaluate(const BrownianPath& path, double s);

/// Left-endpoint Riemann-Stieltjes sum of f against dB over grid-exact
/// [a, b], summed left to right.
double ito_integral(const BrownianPath& path, const std::function<double(double)>& integrand,
                    double a, double b);

/// Trapezoidal quadrature of exp(a*s + b*B_s) over grid-exact [from, to].
double trapezoid_exp_integral(const BrownianPath& path, double a, double b,
                              double from, double to);

/// Trapezoidal approximation of the pullback integral
/// int_{-inf}^0 exp(a*s + b*B_s) ds. tol > 0: the truncation horizon is
/// grown by doubling until the last doubling changes the result by a
/// relative amount < tol (DomainExhaustedError when the path runs out).
/// tol == 0: integrate the full available domain, which makes the
/// stationarity identities exact at the discrete level (shared grid sums).
double pullback_exp_integral(const BrownianPath& path, double a, double b, double tol);

/// Riemann-Stieltjes analogue: int_{-inf}^0 exp(decay*s) dB_s with the same
/// truncation policy.
double pullback_ito_integral(const BrownianPath& path, double decay, double tol);

/// Monte-Carlo realization of P: lazily generated independent paths with
/// per-path seeds derived from master_seed via splitmix64.
class NoiseEnsemble {
public:
    NoiseEnsemble(std::uint64_t master_seed, int n_paths, TimeGrid grid);

    int size() const { return n_paths_; }
    std::uint64_t master_seed() const { return master_seed_; }
    const TimeGrid& grid() const { return grid_; }

    std::uint64_t seed(int i) const;
    BrownianPath path(int i) const;

private:
    std::uint64_t master_seed_;
    int n_paths_;
    TimeGrid grid_;
};

/// splitmix64 output stream element i for a given state; used for seed
/// derivation so ensembles regenerate deterministically.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Deterministic standard normal stream (Box-Muller over mt19937_64).
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}
    double next();

private:
    double uniform();
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rds::noise

#include "rds/noise.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rds::noise {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

TimeGrid::TimeGrid(double base, int level, long half_steps)
    : base_(base), level_(level), half_steps_(half_steps) {
    if (!(base > 0.0) || !std::isfinite(base)) {
        throw std::invalid_argument("TimeGrid: base period must be positive and finite");
    }
    if (level < 0 || level > 40) {
        throw std::invalid_argument("TimeGrid: dyadic level out of range [0, 40]");
    }
    if (half_steps < 1) {
        throw std::invalid_argument("TimeGrid: half range must cover at least one step");
    }
    h_ = std::ldexp(base, -level);
    half_range_ = static_cast<double>(half_steps) * h_;
}

std::optional<long> TimeGrid::index_of(double t) const {
    if (!std::isfinite(t)) return std::nullopt;
    const double q = t / h_;
    if (std::abs(q) > 9.0e15) return std::nullopt;
    const long k = std::llround(q);
    if (static_cast<double>(k) * h_ == t) return k;
    return std::nullopt;
}

double BrownianPath::value_at_index(long k) const {
    const long n = data_->grid.half_steps();
    const long abs_index = k + shift_;
    if (abs_index < -n || abs_index > n) {
        throw std::out_of_range("BrownianPath: index outside path domain");
    }
    return data_->values[static_cast<std::size_t>(abs_index + n)] -
           data_->values[static_cast<std::size_t>(shift_ + n)];
}

double BrownianPath::value_at_time(double s) const {
    const auto k = data_->grid.index_of(s);
    if (!k) {
        throw std::invalid_argument("BrownianPath: time is not a grid point");
    }
    return value_at_index(*k);
}

BrownianPath BrownianPath::coarsened(long factor) const {
    if (factor < 1) throw std::invalid_argument("coarsened: factor must be >= 1");
    if (factor == 1) return *this;
    // factor must be a power of two so the coarse grid stays dyadic
    long f = factor;
    int drop = 0;
    while (f > 1) {
        if (f % 2 != 0) throw std::invalid_argument("coarsened: factor must be a power of two");
        f /= 2;
        ++drop;
    }
    if (drop > data_->grid.level()) {
        throw std::invalid_argument("coarsened: factor exceeds grid resolution");
    }
    if (shift_ % factor != 0) {
        throw std::invalid_argument("coarsened: accumulated shift not divisible by factor");
    }
    const long n = data_->grid.half_steps();
    if (n % factor != 0) {
        throw std::invalid_argument("coarsened: half range not divisible by factor");
    }
    auto coarse = std::make_shared<Data>(Data{
        TimeGrid(data_->grid.base(), data_->grid.level() - drop, n / factor),
        std::vector<double>(),
        data_->seed});
    const long cn = n / factor;
    auto& vals = coarse->values;
    vals.resize(static_cast<std::size_t>(2 * cn + 1));
    for (long k = -cn; k <= cn; ++k) {
        vals[static_cast<std::size_t>(k + cn)] =
            data_->values[static_cast<std::size_t>(k * factor + n)];
    }
    return BrownianPath(std::move(coarse), shift_ / factor, origin_offset_, interpolated_);
}

double GaussianStream::uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double GaussianStream::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

BrownianPath sample_path(std::uint64_t seed, const TimeGrid& grid) {
    const long n = grid.half_steps();
    auto data = std::make_shared<BrownianPath::Data>(
        BrownianPath::Data{grid, std::vector<double>(static_cast<std::size_t>(2 * n + 1)), seed});
    auto& vals = data->values;
    const double sqrt_h = std::sqrt(grid.step());

    vals[static_cast<std::size_t>(n)] = 0.0;
    GaussianStream forward(derive_seed(seed, 0));
    for (long k = 1; k <= n; ++k) {
        vals[static_cast<std::size_t>(n + k)] =
            vals[static_cast<std::size_t>(n + k - 1)] + forward.next() * sqrt_h;
    }
    GaussianStream backward(derive_seed(seed, 1));
    for (long k = 1; k <= n; ++k) {
        vals[static_cast<std::size_t>(n - k)] =
            vals[static_cast<std::size_t>(n - k + 1)] - backward.next() * sqrt_h;
    }
    return BrownianPath(std::move(data), 0, 0.0, false);
}

BrownianPath zero_path(const TimeGrid& grid) {
    const long n = grid.half_steps();
    auto data = std::make_shared<BrownianPath::Data>(
        BrownianPath::Data{grid, std::vector<double>(static_cast<std::size_t>(2 * n + 1), 0.0), 0});
    return BrownianPath(std::move(data), 0, 0.0, false);
}

BrownianPath wiener_shift(const BrownianPath& path, double t) {
    if (t == 0.0) return path;
    const auto j = path.data_->grid.index_of(t);
    if (!j) {
        throw std::invalid_argument(
            "wiener_shift: t is not a grid multiple (use wiener_shift_interpolated)");
    }
    const long n = path.data_->grid.half_steps();
    const long shift = path.shift_ + *j;
    if (shift < -n || shift > n) {
        throw std::out_of_range("wiener_shift: shifted domain is empty");
    }
    return BrownianPath(path.data_, shift, path.origin_offset_ + t, path.interpolated_);
}

BrownianPath wiener_shift_interpolated(const BrownianPath& path, double t) {
    if (const auto j = path.data_->grid.index_of(t)) {
        (void)j;
        return wiener_shift(path, t);
    }
    const TimeGrid& g = path.data_->grid;
    const double bt = evaluate(path, t);
    // Rebase: materialize B_s(theta_t omega) on the largest symmetric grid
    // that stays inside the interpolable domain.
    const long m = static_cast<long>(std::floor(
                       std::min(path.max_time() - t, t - path.min_time()) / g.step())) -
                   1;
    if (m < 1) throw std::out_of_range("wiener_shift_interpolated: shifted domain is empty");
    auto data = std::make_shared<BrownianPath::Data>(
        BrownianPath::Data{TimeGrid(g.base(), g.level(), m),
                           std::vector<double>(static_cast<std::size_t>(2 * m + 1)),
                           path.data_->seed});
    auto& vals = data->values;
    for (long k = -m; k <= m; ++k) {
        vals[static_cast<std::size_t>(k + m)] = evaluate(path, t + g.time_at(k)) - bt;
    }
    return BrownianPath(std::move(data), 0, path.origin_offset_ + t, true);
}

double evaluate(const BrownianPath& path, double s) {
    if (const auto k = path.grid().index_of(s)) {
        return path.value_at_index(*k);
    }
    const double h = path.grid().step();
    const double q = s / h;
    long lo = static_cast<long>(std::floor(q));
    // guard against floor landing one cell off after rounding
    while (static_cast<double>(lo) * h > s) --lo;
    while (static_cast<double>(lo + 1) * h < s) ++lo;
    if (lo < path.min_index() || lo + 1 > path.max_index()) {
        throw std::out_of_range("evaluate: time outside path domain");
    }
    const double a = path.value_at_index(lo);
    const double b = path.value_at_index(lo + 1);
    const double w = (s - static_cast<double>(lo) * h) / h;
    return (1.0 - w) * a + w * b;
}

double ito_integral(const BrownianPath& path, const std::function<double(double)>& integrand,
                    double a, double b) {
    const auto ka = path.grid().index_of(a);
    const auto kb = path.grid().index_of(b);
    if (!ka || !kb) {
        throw std::invalid_argument("ito_integral: endpoints must be grid points");
    }
    if (*ka > *kb) throw std::invalid_argument("ito_integral: requires a <= b");
    if (*ka < path.min_index() || *kb > path.max_index()) {
        throw std::out_of_range("ito_integral: interval outside path domain");
    }
    const double h = path.grid().step();
    double acc = 0.0;
    double prev = path.value_at_index(*ka);
    for (long k = *ka; k < *kb; ++k) {
        const double next = path.value_at_index(k + 1);
        const double f = integrand(static_cast<double>(k) * h);
        if (!std::isfinite(f)) {
            throw std::invalid_argument("ito_integral: integrand not finite on [a, b]");
        }
        acc += f * (next - prev);
        prev = next;
    }
    return acc;
}

double trapezoid_exp_integral(const BrownianPath& path, double a, double b,
                              double from, double to) {
    const auto ka = path.grid().index_of(from);
    const auto kb = path.grid().index_of(to);
    if (!ka || !kb) {
        throw std::invalid_argument("trapezoid_exp_integral: endpoints must be grid points");
    }
    if (*ka > *kb) throw std::invalid_argument("trapezoid_exp_integral: requires from <= to");
    if (*ka < path.min_index() || *kb > path.max_index()) {
        throw std::out_of_range("trapezoid_exp_integral: interval outside path domain");
    }
    const double h = path.grid().step();
    double acc = 0.0;
    double g_prev = std::exp(a * static_cast<double>(*ka) * h + b * path.value_at_index(*ka));
    for (long k = *ka; k < *kb; ++k) {
        const double g_next =
            std::exp(a * static_cast<double>(k + 1) * h + b * path.value_at_index(k + 1));
        acc += 0.5 * h * (g_prev + g_next);
        g_prev = g_next;
    }
    return acc;
}

namespace {

// Shared truncation driver for the two pullback integrals. partial(k_lo)
// evaluates the integral over [k_lo*h, 0].
double adaptive_pullback(const BrownianPath& path, double tol,
                         const std::function<double(long)>& partial) {
    const long available = -path.min_index();
    if (available < 1) {
        throw std::out_of_range("pullback integral: path has no negative-time domain");
    }
    if (tol == 0.0) {
        return partial(-available);
    }
    if (tol < 0.0) throw std::invalid_argument("pullback integral: tol must be >= 0");

    // initial horizon: about one time unit, at least one step
    long span = std::min(available,
                         std::max<long>(1, std::lround(std::ceil(1.0 / path.grid().step()))));
    double prev = partial(-span);
    while (true) {
        const long next_span = (span >= available) ? available : std::min(available, 2 * span);
        if (next_span == span) {
            throw DomainExhaustedError(prev, prev,
                                       "pullback integral: truncation not converged within domain");
        }
        const double cur = partial(-next_span);
        if (cur == prev || std::abs(cur - prev) < tol * std::abs(cur)) {
            return cur;
        }
        if (next_span >= available) {
            throw DomainExhaustedError(prev, cur,
                                       "pullback integral: truncation not converged within domain");
        }
        prev = cur;
        span = next_span;
    }
}

}  // namespace

double pullback_exp_integral(const BrownianPath& path, double a, double b, double tol) {
    if (!(a > 0.0)) throw std::invalid_argument("pullback_exp_integral: decay rate must be > 0");
    const double h = path.grid().step();
    return adaptive_pullback(path, tol, [&](long k_lo) {
        return trapezoid_exp_integral(path, a, b, static_cast<double>(k_lo) * h, 0.0);
    });
}

double pullback_ito_integral(const BrownianPath& path, double decay, double tol) {
    if (!(decay > 0.0)) throw std::invalid_argument("pullback_ito_integral: decay must be > 0");
    const double h = path.grid().step();
    return adaptive_pullback(path, tol, [&](long k_lo) {
        double acc = 0.0;
        double prev = path.value_at_index(k_lo);
        for (long k = k_lo; k < 0; ++k) {
            const double next = path.value_at_index(k + 1);
            acc += std::exp(decay * static_cast<double>(k) * h) * (next - prev);
            prev = next;
        }
        return acc;
    });
}

NoiseEnsemble::NoiseEnsemble(std::uint64_t master_seed, int n_paths, TimeGrid grid)
    : master_seed_(master_seed), n_paths_(n_paths), grid_(grid) {
    if (n_paths < 1) throw std::invalid_argument("NoiseEnsemble: size must be >= 1");
}

std::uint64_t NoiseEnsemble::seed(int i) const {
    if (i < 0 || i >= n_paths_) throw std::out_of_range("NoiseEnsemble: path index");
    return derive_seed(master_seed_, static_cast<std::uint64_t>(i) + 2);
}

BrownianPath NoiseEnsemble::path(int i) const {
    return sample_path(seed(i), grid_);
}

}  // namespace rds::noise

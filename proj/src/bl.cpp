#include "rds/bl.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace rds::measures {

namespace detail {

SimplexSolution simplex_maximize(const std::vector<double>& c,
                                 const std::vector<std::vector<double>>& rows,
                                 const std::vector<double>& rhs) {
    const std::size_t n_vars = c.size();
    const std::size_t n_rows = rows.size();
    if (rhs.size() != n_rows) throw std::invalid_argument("simplex: rhs size mismatch");
    for (double b : rhs) {
        if (b < 0.0) throw std::invalid_argument("simplex: rhs must be nonnegative");
    }

    const std::size_t width = n_vars + n_rows + 1;
    std::vector<std::vector<double>> tab(n_rows + 1, std::vector<double>(width, 0.0));
    for (std::size_t i = 0; i < n_rows; ++i) {
        if (rows[i].size() != n_vars) throw std::invalid_argument("simplex: row size mismatch");
        for (std::size_t j = 0; j < n_vars; ++j) tab[i][j] = rows[i][j];
        tab[i][n_vars + i] = 1.0;
        tab[i][width - 1] = rhs[i];
    }
    for (std::size_t j = 0; j < n_vars; ++j) tab[n_rows][j] = -c[j];

    std::vector<std::size_t> basis(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) basis[i] = n_vars + i;

    const double eps = 1e-11;
    const std::size_t max_iter = 50 * (n_rows + n_vars) + 1000;
    bool degenerate = false;

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        const bool bland = iter > 10 * (n_rows + n_vars);
        // entering column
        std::size_t enter = width;
        double best = -eps;
        for (std::size_t j = 0; j + 1 < width; ++j) {
            const double r = tab[n_rows][j];
            if (r < best) {
                if (bland) {
                    enter = j;
                    break;
                }
                best = r;
                enter = j;
            }
        }
        if (enter == width) {
            SimplexSolution sol;
            sol.x.assign(n_vars, 0.0);
            for (std::size_t i = 0; i < n_rows; ++i) {
                if (basis[i] < n_vars) sol.x[basis[i]] = tab[i][width - 1];
            }
            sol.objective = tab[n_rows][width - 1];
            sol.degenerate = degenerate;
            return sol;
        }
        // ratio test
        std::size_t leave = n_rows;
        double best_ratio = 0.0;
        for (std::size_t i = 0; i < n_rows; ++i) {
            if (tab[i][enter] > eps) {
                const double ratio = tab[i][width - 1] / tab[i][enter];
                if (leave == n_rows || ratio < best_ratio - 1e-15 ||
                    (std::abs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[leave])) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
        }
        if (leave == n_rows) {
            throw std::runtime_error("simplex: unbounded program (box constraints missing?)");
        }
        if (best_ratio <= eps) degenerate = true;
        // pivot
        const double piv = tab[leave][enter];
        auto& prow = tab[leave];
        for (double& v : prow) v /= piv;
        for (std::size_t i = 0; i <= n_rows; ++i) {
            if (i == leave) continue;
            const double f = tab[i][enter];
            if (f == 0.0) continue;
            auto& row = tab[i];
            for (std::size_t j = 0; j < width; ++j) row[j] -= f * prow[j];
        }
        basis[leave] = enter;
    }
    throw std::runtime_error("simplex: iteration limit reached");
}

namespace {

// Concave piecewise-linear function on [lo, hi]; slopes non-increasing.
struct ConcavePwl {
    double lo = 0.0;
    double hi = 0.0;
    double value_at_lo = 0.0;
    std::vector<double> starts;  // starts[0] == lo
    std::vector<double> slopes;  // slopes[i] applies on [starts[i], next start)

    double value(double x) const {
        double v = value_at_lo;
        for (std::size_t i = 0; i < slopes.size(); ++i) {
            const double seg_end = (i + 1 < starts.size()) ? starts[i + 1] : hi;
            if (x <= seg_end) {
                return v + slopes[i] * (x - starts[i]);
            }
            v += slopes[i] * (seg_end - starts[i]);
        }
        return v;
    }

    // argmax interval [mlo, mhi] of the concave function
    std::pair<double, double> argmax() const {
        double mlo = hi, mhi = hi;
        for (std::size_t i = 0; i < slopes.size(); ++i) {
            if (slopes[i] <= 0.0) {
                mlo = starts[i];
                mhi = starts[i];
                // flat top extends while slopes stay exactly zero
                std::size_t j = i;
                while (j < slopes.size() && slopes[j] == 0.0) {
                    mhi = (j + 1 < starts.size()) ? starts[j + 1] : hi;
                    ++j;
                }
                return {mlo, mhi};
            }
        }
        return {mlo, mhi};  // increasing everywhere: argmax at hi
    }

    void add_linear(double c) {
        for (double& s : slopes) s += c;
        value_at_lo += c * lo;
    }

    void append(double start, double slope) {
        if (!starts.empty() && start <= starts.back()) {
            return;  // zero-length segment
        }
        if (!slopes.empty() && slopes.back() == slope) return;  // merge equal slopes
        starts.push_back(start);
        slopes.push_back(slope);
    }

    // sup over the sliding window [x - a, x + a] intersected with [lo, hi]
    ConcavePwl window_max(double a) const {
        if (a == 0.0) return *this;
        const auto [mlo, mhi] = argmax();
        ConcavePwl out;
        out.lo = lo;
        out.hi = hi;
        const double plateau_lo = std::max(lo, mlo - a);
        const double plateau_hi = std::min(hi, mhi + a);
        out.value_at_lo = (plateau_lo > lo) ? value(lo + a) : value(mlo);

        // rising part of *this on [lo + a, mlo], shifted left by a
        if (plateau_lo > lo) {
            for (std::size_t i = 0; i < slopes.size(); ++i) {
                if (slopes[i] <= 0.0) break;
                const double seg_start = starts[i];
                const double seg_end = (i + 1 < starts.size()) ? std::min(starts[i + 1], mlo) : mlo;
                const double ns = std::max(lo, seg_start - a);
                const double ne = std::min(plateau_lo, seg_end - a);
                if (ne > ns) out.append(ns, slopes[i]);
            }
        }
        out.append(plateau_lo, 0.0);
        // falling part on [mhi, hi - a], shifted right by a
        if (plateau_hi < hi) {
            for (std::size_t i = 0; i < slopes.size(); ++i) {
                if (slopes[i] >= 0.0) continue;
                const double seg_start = std::max(starts[i], mhi);
                const double seg_end = (i + 1 < starts.size()) ? starts[i + 1] : hi;
                const double ns = std::max(plateau_hi, seg_start + a);
                const double ne = std::min(hi, seg_end + a);
                if (ne > ns) out.append(ns, slopes[i]);
            }
        }
        if (out.starts.front() > lo) {
            out.starts.front() = lo;  // first rising fragment always lands at lo
        }
        return out;
    }
};

}  // namespace

ChainSolution chain_maximize(const std::vector<double>& coeffs, const std::vector<double>& gaps,
                             double cap) {
    const std::size_t m = coeffs.size();
    if (m == 0) return {};
    if (gaps.size() + 1 != m) throw std::invalid_argument("chain_maximize: gaps size mismatch");

    ConcavePwl f;
    f.lo = -cap;
    f.hi = cap;
    f.value_at_lo = coeffs[0] * -cap;
    f.starts = {-cap};
    f.slopes = {coeffs[0]};

    std::vector<std::pair<double, double>> argmax_stack(m);
    argmax_stack[0] = f.argmax();
    for (std::size_t k = 1; k < m; ++k) {
        f = f.window_max(gaps[k - 1]);
        f.add_linear(coeffs[k]);
        argmax_stack[k] = f.argmax();
    }

    ChainSolution sol;
    const auto [mlo, mhi] = argmax_stack[m - 1];
    sol.objective = f.value(mlo);
    sol.g.assign(m, 0.0);
    sol.g[m - 1] = mlo;
    for (std::size_t k = m - 1; k-- > 0;) {
        const double w_lo = sol.g[k + 1] - gaps[k];
        const double w_hi = sol.g[k + 1] + gaps[k];
        const auto [alo, ahi] = argmax_stack[k];
        // concavity: the stage argmax clamped into the reachable window
        const double g = std::clamp(std::clamp(sol.g[k + 1], alo, ahi), w_lo, w_hi);
        sol.g[k] = std::clamp(g, -cap, cap);
    }
    return sol;
}

}  // namespace detail

EmpiricalMeasure uniform_measure(std::vector<systems::StatePoint> support,
                                 std::optional<std::uint64_t> provenance) {
    EmpiricalMeasure mu;
    const std::size_t n = support.size();
    if (n == 0) throw std::invalid_argument("uniform_measure: empty support");
    mu.support = std::move(support);
    mu.weights.assign(n, 1.0 / static_cast<double>(n));
    mu.provenance_seed = provenance;
    return mu;
}

void validate_measure(const EmpiricalMeasure& mu) {
    if (mu.support.size() != mu.weights.size() || mu.support.empty()) {
        throw std::invalid_argument("measure: support/weight size mismatch");
    }
    double sum = 0.0;
    for (double w : mu.weights) {
        if (w < 0.0) throw std::invalid_argument("measure: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("measure: weights must sum to 1");
    }
}

namespace {

struct PointKey {
    double a, b, c;
    int tag;
    bool operator<(const PointKey& o) const {
        if (tag != o.tag) return tag < o.tag;
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        return c < o.c;
    }
};

PointKey key_of(const systems::StatePoint& p) {
    if (const auto* r = std::get_if<systems::RealPoint>(&p)) return {r->x, 0.0, 0.0, 0};
    if (const auto* c = std::get_if<systems::CylPoint>(&p)) return {c->alpha, c->rho, 0.0, 1};
    if (const auto* t = std::get_if<systems::TorusPoint>(&p)) return {t->r, t->alpha, t->z, 2};
    const auto& q = std::get<systems::ProductPoint>(p);
    return {q.x, q.y, q.z, 3};
}

// Union support with signed coefficients mu_k - nu_k, bitwise-identical
// points merged.
struct UnionSupport {
    std::vector<systems::StatePoint> points;
    std::vector<double> coeffs;
};

UnionSupport build_union(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    std::map<PointKey, std::size_t> index;
    UnionSupport u;
    const auto add = [&](const systems::StatePoint& p, double w) {
        const auto key = key_of(p);
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(key, u.points.size());
            u.points.push_back(p);
            u.coeffs.push_back(w);
        } else {
            u.coeffs[it->second] += w;
        }
    };
    for (std::size_t i = 0; i < mu.support.size(); ++i) add(mu.support[i], mu.weights[i]);
    for (std::size_t i = 0; i < nu.support.size(); ++i) add(nu.support[i], -nu.weights[i]);
    return u;
}

// 1-D coordinate when the support is a line in its kind's radial/real
// coordinate; nullopt otherwise.
std::optional<std::vector<double>> line_coordinates(const std::vector<systems::StatePoint>& pts) {
    std::vector<double> coord(pts.size());
    int tag = -1;
    double b0 = 0.0, c0 = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto k = key_of(pts[i]);
        if (i == 0) {
            tag = k.tag;
            b0 = k.b;
            c0 = k.c;
        } else if (k.tag != tag) {
            return std::nullopt;
        }
        // non-line coordinates must agree to well below metric tolerances
        if (std::abs(k.b - b0) > 1e-12 || std::abs(k.c - c0) > 1e-12) return std::nullopt;
        coord[i] = k.a;
    }
    return coord;
}

BLResult solve_chain(const UnionSupport& u, const std::vector<double>& coord, const BLConfig& cfg,
                     const Metric& metric) {
    const std::size_t m = u.points.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return coord[a] < coord[b];
    });

    std::vector<double> coeffs(m), gaps(m > 0 ? m - 1 : 0);
    for (std::size_t i = 0; i < m; ++i) coeffs[i] = u.coeffs[order[i]];
    double gap_sum = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        gaps[i] = cfg.lip_constant * metric(u.points[order[i]], u.points[order[i + 1]]);
        gap_sum += gaps[i];
    }
    // additivity of the metric along the sorted line; bail out otherwise
    if (m >= 2) {
        const double end_to_end = cfg.lip_constant * metric(u.points[order.front()], u.points[order.back()]);
        if (std::abs(end_to_end - gap_sum) > 1e-9 * (1.0 + gap_sum)) {
            throw std::runtime_error("chain: metric not additive");
        }
    }

    const auto sol = detail::chain_maximize(coeffs, gaps, cfg.sup_bound);
    BLResult res;
    res.distance = sol.objective;
    res.support = u.points;
    res.optimizer_values.resize(m);
    for (std::size_t i = 0; i < m; ++i) res.optimizer_values[order[i]] = sol.g[i];
    res.chain_path = true;
    return res;
}

BLResult solve_simplex(const UnionSupport& u, const BLConfig& cfg, const Metric& metric) {
    const std::size_t m = u.points.size();
    const double cap = cfg.sup_bound;

    // pairwise Lipschitz bounds
    std::vector<std::vector<double>> bound(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            bound[i][j] = bound[j][i] = cfg.lip_constant * metric(u.points[i], u.points[j]);
        }
    }

    // variables x = g + cap in [0, 2 cap]; objective sum c_k g_k
    std::vector<double> c = u.coeffs;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    const auto add_box = [&]() {
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<double> row(m, 0.0);
            row[i] = 1.0;
            rows.push_back(std::move(row));
            rhs.push_back(2.0 * cap);
        }
    };
    std::vector<std::pair<std::size_t, std::size_t>> active;
    const auto add_pair = [&](std::size_t i, std::size_t j) {
        std::vector<double> row(m, 0.0);
        row[i] = 1.0;
        row[j] = -1.0;
        rows.push_back(row);
        rhs.push_back(bound[i][j]);
        for (double& v : row) v = -v;
        rows.push_back(std::move(row));
        rhs.push_back(bound[i][j]);
        active.emplace_back(i, j);
    };

    add_box();
    // seed with chain-adjacent pairs in an arbitrary 1-D shadow; the
    // generation loop supplies whatever else binds
    if (m >= 2) {
        for (std::size_t i = 0; i + 1 < m; ++i) add_pair(i, i + 1);
    }

    detail::SimplexSolution sim;
    std::vector<double> g(m, 0.0);
    for (int round = 0; round < 60; ++round) {
        sim = detail::simplex_maximize(c, rows, rhs);
        for (std::size_t i = 0; i < m; ++i) g[i] = sim.x[i] - cap;
        // violated-pair sweep: triangle-redundant constraints never get added
        std::vector<std::tuple<double, std::size_t, std::size_t>> violated;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                const double excess = std::abs(g[i] - g[j]) - bound[i][j];
                if (excess > 1e-10) violated.emplace_back(excess, i, j);
            }
        }
        if (violated.empty()) break;
        std::sort(violated.rbegin(), violated.rend());
        const std::size_t take = std::min<std::size_t>(violated.size(), std::max<std::size_t>(8, m / 4));
        for (std::size_t k = 0; k < take; ++k) {
            add_pair(std::get<1>(violated[k]), std::get<2>(violated[k]));
        }
    }

    BLResult res;
    double obj = 0.0;
    for (std::size_t i = 0; i < m; ++i) obj += u.coeffs[i] * g[i];
    res.distance = obj;
    res.support = u.points;
    res.optimizer_values = g;
    res.status = sim.degenerate ? LpStatus::degenerate : LpStatus::solved;
    res.chain_path = false;
    return res;
}

}  // namespace

BLResult bl_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const BLConfig& cfg,
                     const Metric& metric, Solver solver) {
    validate_measure(mu);
    validate_measure(nu);
    if (!(cfg.sup_bound > 0.0) || !(cfg.lip_constant > 0.0)) {
        throw std::invalid_argument("bl_distance: config bounds must be positive");
    }
    const auto u = build_union(mu, nu);
    if (u.points.size() == 1) {
        BLResult res;
        res.support = u.points;
        res.optimizer_values = {0.0};
        return res;
    }
    const auto coord = line_coordinates(u.points);
    if (solver == Solver::chain || (solver == Solver::automatic && coord)) {
        if (!coord) throw std::invalid_argument("bl_distance: support is not a line");
        return solve_chain(u, *coord, cfg, metric);
    }
    return solve_simplex(u, cfg, metric);
}

double bl_distance_factorized(const FactorizedMeasure& mu, const FactorizedMeasure& nu,
                              const BLConfig& cfg, const Metric& metric) {
    if (mu.omega_ids.size() != mu.points.size() || nu.omega_ids.size() != nu.points.size()) {
        throw std::invalid_argument("bl_distance_factorized: malformed factorization");
    }
    if (mu.omega_ids != nu.omega_ids) {
        throw std::invalid_argument("bl_distance_factorized: omega samples do not match");
    }
    const std::size_t n = mu.points.size();
    if (n == 0) throw std::invalid_argument("bl_distance_factorized: empty sample");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += std::min(2.0 * cfg.sup_bound, cfg.lip_constant * metric(mu.points[i], nu.points[i]));
    }
    return acc / static_cast<double>(n);
}

BootstrapBand bootstrap_bl_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                    const BLConfig& cfg, const Metric& metric, int resamples,
                                    std::uint64_t seed) {
    validate_measure(mu);
    validate_measure(nu);
    if (resamples < 8) throw std::invalid_argument("bootstrap: need at least 8 resamples");
    std::mt19937_64 rng(seed);
    const std::size_t nm = mu.support.size();
    const std::size_t nn = nu.support.size();
    const bool matched = nm == nn;
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        EmpiricalMeasure rm = mu;
        EmpiricalMeasure rn = nu;
        std::fill(rm.weights.begin(), rm.weights.end(), 0.0);
        std::fill(rn.weights.begin(), rn.weights.end(), 0.0);
        const double wm = 1.0 / static_cast<double>(nm);
        const double wn = 1.0 / static_cast<double>(nn);
        for (std::size_t i = 0; i < nm; ++i) {
            const std::size_t pick = rng() % nm;
            rm.weights[pick] += wm;
            if (matched) rn.weights[pick] += wn;
        }
        if (!matched) {
            for (std::size_t i = 0; i < nn; ++i) rn.weights[rng() % nn] += wn;
        }
        values.push_back(bl_distance(rm, rn, cfg, metric).distance);
    }
    std::sort(values.begin(), values.end());
    BootstrapBand band;
    band.resamples = resamples;
    band.lo = values[static_cast<std::size_t>(std::floor(0.025 * (resamples - 1)))];
    band.hi = values[static_cast<std::size_t>(std::ceil(0.975 * (resamples - 1)))];
    return band;
}

}  // namespace rds::measures

#pragma once

// Exhaustive vertex enumeration over the bounded-Lipschitz LP's constraint
// polytope: every vertex solves m active constraints, so scanning all
// m-subsets finds the exact optimum. Test-only oracle, independent of the
// production solvers.

#include <cmath>
#include <functional>
#include <vector>

#include "rds/bl.hpp"

namespace rds::testing {

inline double vertex_oracle(const std::vector<double>& xs, const std::vector<double>& coeffs,
                            const measures::BLConfig& cfg) {
    const std::size_t m = xs.size();
    struct Row {
        std::vector<double> a;
        double rhs;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> e(m, 0.0);
        e[i] = 1.0;
        rows.push_back({e, cfg.sup_bound});
        e[i] = -1.0;
        rows.push_back({e, cfg.sup_bound});
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = cfg.lip_constant * std::abs(xs[i] - xs[j]);
            std::vector<double> r(m, 0.0);
            r[i] = 1.0;
            r[j] = -1.0;
            rows.push_back({r, d});
            r[i] = -1.0;
            r[j] = 1.0;
            rows.push_back({r, d});
        }
    }
    double best = -1e300;
    std::vector<std::size_t> pick(m);
    const std::size_t n_rows = rows.size();
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
        if (depth == m) {
            std::vector<std::vector<double>> a(m, std::vector<double>(m + 1));
            for (std::size_t r = 0; r < m; ++r) {
                for (std::size_t c = 0; c < m; ++c) a[r][c] = rows[pick[r]].a[c];
                a[r][m] = rows[pick[r]].rhs;
            }
            for (std::size_t col = 0; col < m; ++col) {
                std::size_t piv = col;
                for (std::size_t r = col + 1; r < m; ++r) {
                    if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
                }
                if (std::abs(a[piv][col]) < 1e-9) return;  // singular subset
                std::swap(a[col], a[piv]);
                for (std::size_t r = 0; r < m; ++r) {
                    if (r == col) continue;
                    const double f = a[r][col] / a[col][col];
                    for (std::size_t c = col; c <= m; ++c) a[r][c] -= f * a[col][c];
                }
            }
            std::vector<double> g(m);
            for (std::size_t r = 0; r < m; ++r) g[r] = a[r][m] / a[r][r];
            for (const auto& row : rows) {
                double lhs = 0.0;
                for (std::size_t c = 0; c < m; ++c) lhs += row.a[c] * g[c];
                if (lhs > row.rhs + 1e-9) return;
            }
            double obj = 0.0;
            for (std::size_t c = 0; c < m; ++c) obj += coeffs[c] * g[c];
            if (obj > best) best = obj;
            return;
        }
        for (std::size_t r = start; r + (m - depth) <= n_rows; ++r) {
            pick[depth] = r;
            rec(r + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

inline double oracle_distance(const measures::EmpiricalMeasure& mu,
                              const measures::EmpiricalMeasure& nu,
                              const measures::BLConfig& cfg) {
    std::vector<double> xs;
    std::vector<double> cs;
    const auto add = [&](double x, double w) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] == x) {
                cs[i] += w;
                return;
            }
        }
        xs.push_back(x);
        cs.push_back(w);
    };
    for (std::size_t i = 0; i < mu.support.size(); ++i) {
        add(std::get<systems::RealPoint>(mu.support[i]).x, mu.weights[i]);
    }
    for (std::size_t i = 0; i < nu.support.size(); ++i) {
        add(std::get<systems::RealPoint>(nu.support[i]).x, -nu.weights[i]);
    }
    return vertex_oracle(xs, cs, cfg);
}

}  // namespace rds::testing

#include "rds/systems.hpp"

#include <cmath>

#include "rds/diophantine.hpp"

namespace rds::systems {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

[[noreturn]] void kind_mismatch(const SystemDescriptor& desc) {
    throw std::invalid_argument("state point does not match system kind " + kind_name(desc.kind));
}

double require_nonneg_time(double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("cocycle time must be >= 0");
    return t;
}

// Advance a reduced circle coordinate; the increment is reduced first so
// that whole turns leave the stored representative bitwise unchanged.
double advance_angle(double reduced, double increment) {
    return frac_nearest(reduced + frac_nearest(increment));
}

// Radial part of Eqs. 21/26/37: r exp(t + B_t) / (1 + 2 r^2 I(t))^{1/2}
// with I(t) the trapezoidal quadrature of exp(2s + 2 B_s) over [0, t].
double radial_cocycle(double r, double t, const noise::BrownianPath& path) {
    const double quad = noise::trapezoid_exp_integral(path, 2.0, 2.0, 0.0, t);
    const double bt = path.value_at_time(t);
    return r * std::exp(t + bt) / std::sqrt(1.0 + 2.0 * r * r * quad);
}

bool rational_warning(double value) {
    const auto cf = dio::continued_fraction(value, 20);
    return cf.rational;
}

}  // namespace

std::string kind_name(Kind k) {
    switch (k) {
        case Kind::ou: return "ou";
        case Kind::pitchfork: return "pitchfork";
        case Kind::cylinder: return "cylinder";
        case Kind::torus: return "torus";
        case Kind::product: return "product";
    }
    return "?";
}

double frac_nearest(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("frac_nearest: input must be finite");
    return x - std::ceil(x - 0.5);
}

StatePoint real_point(double x) { return RealPoint{x}; }

StatePoint cyl_point(double alpha, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("cylinder point: rho must be > 0");
    return CylPoint{frac_nearest(alpha), rho};
}

StatePoint torus_point(double r, double alpha, double z) {
    if (!(r > 0.0)) throw std::invalid_argument("torus point: r must be > 0");
    return TorusPoint{r, frac_nearest(alpha), frac_nearest(z)};
}

StatePoint product_point(double x, double y, double z) {
    return ProductPoint{frac_nearest(x), frac_nearest(y), z};
}

SystemDescriptor make_ou(double tol) {
    SystemDescriptor d;
    d.kind = Kind::ou;
    d.tol = tol;
    return d;
}

SystemDescriptor make_pitchfork(double tol) {
    SystemDescriptor d;
    d.kind = Kind::pitchfork;
    d.tol = tol;
    return d;
}

SystemDescriptor make_cylinder(double alpha0, double tol) {
    SystemDescriptor d;
    d.kind = Kind::cylinder;
    d.alpha0 = frac_nearest(alpha0);
    d.tol = tol;
    return d;
}

SystemDescriptor make_torus(double gamma, double alpha0, double z0, double tol) {
    if (!std::isfinite(gamma)) throw std::invalid_argument("torus: gamma must be finite");
    SystemDescriptor d;
    d.kind = Kind::torus;
    d.gamma = gamma;
    d.alpha0 = frac_nearest(alpha0);
    d.z0 = frac_nearest(z0);
    d.tol = tol;
    d.gamma_rational_warning = rational_warning(gamma);
    return d;
}

SystemDescriptor product_cocycle(double t1, double t2, const SystemDescriptor& g) {
    if (!(t1 > 0.0) || !(t2 > 0.0)) {
        throw std::invalid_argument("product_cocycle: periods must be > 0");
    }
    if (g.kind != Kind::ou && g.kind != Kind::pitchfork) {
        throw std::invalid_argument("product_cocycle: random factor must be a catalog cocycle on R");
    }
    SystemDescriptor d;
    d.kind = Kind::product;
    d.t1 = t1;
    d.t2 = t2;
    d.g_kind = g.kind;
    d.g_tol = g.tol;
    d.period_ratio_warning = rational_warning(t1 / t2);
    return d;
}

StatePoint apply_cocycle(const SystemDescriptor& desc, double t,
                         const noise::BrownianPath& path, const StatePoint& x) {
    require_nonneg_time(t);
    switch (desc.kind) {
        case Kind::ou: {
            const auto* p = std::get_if<RealPoint>(&x);
            if (!p) kind_mismatch(desc);
            const double drift =
                noise::ito_integral(path, [t](double s) { return std::exp(s - t); }, 0.0, t);
            return RealPoint{std::exp(-t) * p->x + drift};
        }
        case Kind::pitchfork: {
            const auto* p = std::get_if<RealPoint>(&x);
            if (!p) kind_mismatch(desc);
            return RealPoint{radial_cocycle(p->x, t, path)};
        }
        case Kind::cylinder: {
            const auto* p = std::get_if<CylPoint>(&x);
            if (!p) kind_mismatch(desc);
            return CylPoint{advance_angle(p->alpha, t / kTwoPi), radial_cocycle(p->rho, t, path)};
        }
        case Kind::torus: {
            const auto* p = std::get_if<TorusPoint>(&x);
            if (!p) kind_mismatch(desc);
            return TorusPoint{radial_cocycle(p->r, t, path), advance_angle(p->alpha, t),
                              advance_angle(p->z, desc.gamma * t)};
        }
        case Kind::product: {
            const auto* p = std::get_if<ProductPoint>(&x);
            if (!p) kind_mismatch(desc);
            SystemDescriptor g;
            g.kind = desc.g_kind;
            g.tol = desc.g_tol;
            const auto gz = apply_cocycle(g, t, path, RealPoint{p->z});
            return ProductPoint{advance_angle(p->x, t / desc.t1), advance_angle(p->y, t / desc.t2),
                                std::get<RealPoint>(gz).x};
        }
    }
    kind_mismatch(desc);
}

double phase_metric(const SystemDescriptor& desc, const StatePoint& a, const StatePoint& b) {
    switch (desc.kind) {
        case Kind::ou:
        case Kind::pitchfork: {
            const auto* pa = std::get_if<RealPoint>(&a);
            const auto* pb = std::get_if<RealPoint>(&b);
            if (!pa || !pb) kind_mismatch(desc);
            return std::abs(pa->x - pb->x);
        }
        case Kind::cylinder: {
            const auto* pa = std::get_if<CylPoint>(&a);
            const auto* pb = std::get_if<CylPoint>(&b);
            if (!pa || !pb) kind_mismatch(desc);
            const double da = frac_nearest(pa->alpha - pb->alpha);
            const double dr = pa->rho - pb->rho;
            return std::sqrt(da * da + dr * dr);
        }
        case Kind::torus: {
            const auto* pa = std::get_if<TorusPoint>(&a);
            const auto* pb = std::get_if<TorusPoint>(&b);
            if (!pa || !pb) kind_mismatch(desc);
            const double dr = pa->r - pb->r;
            const double da = frac_nearest(pa->alpha - pb->alpha);
            const double dz = frac_nearest(pa->z - pb->z);
            return std::sqrt(dr * dr + da * da + dz * dz);
        }
        case Kind::product: {
            const auto* pa = std::get_if<ProductPoint>(&a);
            const auto* pb = std::get_if<ProductPoint>(&b);
            if (!pa || !pb) kind_mismatch(desc);
            const double dx = frac_nearest(pa->x - pb->x);
            const double dy = frac_nearest(pa->y - pb->y);
            const double dz = pa->z - pb->z;
            return std::sqrt(dx * dx + dy * dy + dz * dz);
        }
    }
    kind_mismatch(desc);
}

double radial_stationary_value(const noise::BrownianPath& path, double tol) {
    return 1.0 / std::sqrt(2.0 * noise::pullback_exp_integral(path, 2.0, 2.0, tol));
}

SolutionSection reference_section(const SystemDescriptor& desc) {
    SolutionSection section;
    section.desc = desc;
    switch (desc.kind) {
        case Kind::ou:
            section.label = SectionLabel::stationary;
            section.eval = [tol = desc.tol](double t, const noise::BrownianPath& path) -> StatePoint {
                return RealPoint{noise::pullback_ito_integral(noise::wiener_shift(path, t), 1.0, tol)};
            };
            break;
        case Kind::pitchfork:
            section.label = SectionLabel::stationary;
            section.eval = [tol = desc.tol](double t, const noise::BrownianPath& path) -> StatePoint {
                return RealPoint{radial_stationary_value(noise::wiener_shift(path, t), tol)};
            };
            break;
        case Kind::cylinder:
            section.label = SectionLabel::random_periodic;
            section.period = kTwoPi;
            section.eval = [alpha0 = desc.alpha0,
                            tol = desc.tol](double t, const noise::BrownianPath& path) -> StatePoint {
                return CylPoint{advance_angle(alpha0, t / kTwoPi),
                                radial_stationary_value(noise::wiener_shift(path, t), tol)};
            };
            break;
        case Kind::torus:
            section.label = SectionLabel::random_almost_periodic;
            section.eval = [d = desc](double t, const noise::BrownianPath& path) -> StatePoint {
                return TorusPoint{radial_stationary_value(noise::wiener_shift(path, t), d.tol),
                                  advance_angle(d.alpha0, t), advance_angle(d.z0, d.gamma * t)};
            };
            break;
        case Kind::product:
            section.label = SectionLabel::random_almost_periodic;
            section.eval = [d = desc](double t, const noise::BrownianPath& path) -> StatePoint {
                const auto shifted = noise::wiener_shift(path, t);
                const double z = d.g_kind == Kind::ou
                                     ? noise::pullback_ito_integral(shifted, 1.0, d.g_tol)
                                     : radial_stationary_value(shifted, d.g_tol);
                return ProductPoint{advance_angle(d.alpha0, t / d.t1),
                                    advance_angle(d.z0, t / d.t2), z};
            };
            break;
    }
    return section;
}

SolutionSection section_from_initial(const SystemDescriptor& desc,
                                     std::function<StatePoint(const noise::BrownianPath&)> h0) {
    SolutionSection section;
    section.desc = desc;
    section.label = SectionLabel::random_almost_periodic;
    section.eval = [desc, h0 = std::move(h0)](double t,
                                              const noise::BrownianPath& path) -> StatePoint {
        return apply_cocycle(desc, t, path, h0(path));
    };
    return section;
}

}  // namespace rds::systems

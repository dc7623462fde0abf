#pragma once

#include <functional>
#include <string>
#include <variant>

#include "rds/noise.hpp"

namespace rds::systems {

enum class Kind { ou, pitchfork, cylinder, torus, product };

std::string kind_name(Kind k);

/// Nearest-integer fractional part: the unique representative of x mod Z
/// in (-1/2, 1/2].
double frac_nearest(double x);

struct RealPoint {
    double x = 0.0;
};

/// Cylinder S^1 x R+: alpha stored reduced, rho > 0.
struct CylPoint {
    double alpha = 0.0;
    double rho = 1.0;
};

/// R+ x S^1 x S^1 in the order (r, alpha, z).
struct TorusPoint {
    double r = 1.0;
    double alpha = 0.0;
    double z = 0.0;
};

/// S^1 x S^1 x R for the product construction: (x, y) deterministic torus
/// factor, z the random component.
struct ProductPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

using StatePoint = std::variant<RealPoint, CylPoint, TorusPoint, ProductPoint>;

StatePoint real_point(double x);
StatePoint cyl_point(double alpha, double rho);
StatePoint torus_point(double r, double alpha, double z);
StatePoint product_point(double x, double y, double z);

/// Which cocycle plus its parameters. tol is the pullback truncation
/// tolerance handed to the noise module; tol == 0 selects full-domain
/// truncation, under which the discrete stationarity identities are exact.
struct SystemDescriptor {
    Kind kind = Kind::ou;
    double gamma = 0.0;   // torus rotation number
    double alpha0 = 0.0;  // initial phase (cylinder/torus alpha, product x)
    double z0 = 0.0;      // initial phase (torus z, product y)
    double tol = 0.0;
    double t1 = 1.0;  // product flow periods
    double t2 = 1.0;
    Kind g_kind = Kind::ou;  // product random factor
    double g_tol = 0.0;
    bool gamma_rational_warning = false;
    bool period_ratio_warning = false;
};

SystemDescriptor make_ou(double tol = 0.0);
SystemDescriptor make_pitchfork(double tol = 0.0);
SystemDescriptor make_cylinder(double alpha0 = 0.0, double tol = 0.0);
SystemDescriptor make_torus(double gamma, double alpha0 = 0.0, double z0 = 0.0, double tol = 0.0);

/// Product of the two-frequency torus flow (periods t1, t2) with a catalog
/// random cocycle g on R. A warning flag is attached when t1/t2 looks
/// rational within continued-fraction depth.
SystemDescriptor product_cocycle(double t1, double t2, const SystemDescriptor& g);

/// The closed-form cocycle Phi(t, omega) x, t >= 0 grid-exact.
StatePoint apply_cocycle(const SystemDescriptor& desc, double t,
                         const noise::BrownianPath& path, const StatePoint& x);

/// Phase-space metric keyed by system kind; circle components are compared
/// through the nearest-integer fractional part.
double phase_metric(const SystemDescriptor& desc, const StatePoint& a, const StatePoint& b);

enum class SectionLabel { stationary, random_periodic, random_almost_periodic };

/// A solution section H(t, omega). Negative t is reached through the shift.
struct SolutionSection {
    SystemDescriptor desc;
    std::function<StatePoint(double, const noise::BrownianPath&)> eval;
    SectionLabel label = SectionLabel::stationary;
    double period = 0.0;  // for random_periodic
};

/// The paper's reference solutions: OU and pitchfork stationary sections,
/// the cylinder random periodic section (period 2*pi) and the torus random
/// almost periodic section. All radial parts use the factor-2 pullback
/// convention, the one under which the flow identity actually closes.
SolutionSection reference_section(const SystemDescriptor& desc);

/// H(t, omega) = Phi(t, omega) H0(omega), t >= 0.
SolutionSection section_from_initial(const SystemDescriptor& desc,
                                     std::function<StatePoint(const noise::BrownianPath&)> h0);

/// Stationary value for the pitchfork-type radial component on a given
/// path: (2 * int_{-inf}^0 exp(2s + 2 B_s) ds)^(-1/2).
double radial_stationary_value(const noise::BrownianPath& path, double tol);

}  // namespace rds::systems

// Command-line front end: simulation, verification, almost-period search,
// measure comparisons and the SDE oracle, with deterministic CSV outputs.
#include <CLI11.hpp>

#include <algorithm>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "rds/csv.hpp"
#include "rds/diophantine.hpp"
#include "rds/measures.hpp"
#include "rds/noise.hpp"
#include "rds/sde.hpp"
#include "rds/systems.hpp"
#include "rds/verify.hpp"

namespace {

using namespace rds;

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSqrt2 = 1.4142135623730951;

struct CommonOpts {
    std::uint64_t seed = 12345;
    int n_paths = 32;
    int level = 10;
    double t_units = 32.0;
    double h_override = 0.0;
    double gamma = kSqrt2;
    double tol = 0.0;
    std::string system = "ou";
    std::string out_dir = ".";
};

double base_for(const std::string& system) { return system == "cylinder" ? kTwoPi : 1.0; }

systems::SystemDescriptor descriptor_for(const CommonOpts& o) {
    if (o.system == "ou") return systems::make_ou(o.tol);
    if (o.system == "pitchfork") return systems::make_pitchfork(o.tol);
    if (o.system == "cylinder") return systems::make_cylinder(0.0, o.tol);
    if (o.system == "torus") return systems::make_torus(o.gamma, 0.0, 0.0, o.tol);
    throw CLI::ValidationError("--system", "unknown system: " + o.system);
}

noise::TimeGrid make_grid(const CommonOpts& o, double base) {
    int level = o.level;
    if (o.h_override > 0.0) {
        const double ratio = base / o.h_override;
        level = static_cast<int>(std::lround(std::log2(ratio)));
        if (level < 0 || level > 40 || std::ldexp(base, -level) != o.h_override) {
            throw CLI::ValidationError(
                "--h", "step must be a dyadic fraction base/2^k of the base period " +
                           io::format_double(base));
        }
    }
    const double steps_real = o.t_units * std::ldexp(1.0, level);
    const long steps = std::lround(steps_real);
    if (steps < 1 || static_cast<double>(steps) != steps_real) {
        throw CLI::ValidationError("--T-units", "half range must be a whole number of steps");
    }
    return noise::TimeGrid(base, level, steps);
}

io::Header config_header(const CommonOpts& o, const io::Header& extra = {}) {
    io::Header h;
    h.emplace_back("command", "rds");
    h.emplace_back("system", o.system);
    h.emplace_back("seed", std::to_string(o.seed));
    h.emplace_back("n_paths", std::to_string(o.n_paths));
    h.emplace_back("level", std::to_string(o.level));
    h.emplace_back("T_units", io::format_double(o.t_units));
    h.emplace_back("gamma", io::format_double(o.gamma));
    h.emplace_back("tol", io::format_double(o.tol));
    for (const auto& kv : extra) h.push_back(kv);
    return h;
}

std::string out_path(const CommonOpts& o, const std::string& name) {
    std::filesystem::create_directories(o.out_dir);
    return o.out_dir + "/" + name;
}

std::vector<double> dyadic_times(double base, std::initializer_list<double> units) {
    std::vector<double> out;
    for (double u : units) out.push_back(u * base);
    return out;
}

// Flat key=value config support, handled before CLI11 sees the arguments:
// each file entry becomes a "--key value" pair appended to the argument
// list unless the flag was given explicitly, so command-line flags override
// file values.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_file;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw std::runtime_error("--config needs a file");
            config_file = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            config_file = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
            break;
        }
    }
    if (config_file.empty()) return args;
    std::ifstream in(config_file);
    if (!in) throw std::runtime_error("cannot open config file: " + config_file);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        const std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : args) {
            if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        }
        if (!given) {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_system = true) {
    cmd->set_help_flag("--help", "print help");  // frees the name "h" for the step option
    if (with_system) {
        cmd->add_option("--system", o.system, "ou | pitchfork | cylinder | torus");
    }
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--n-paths,--N", o.n_paths, "ensemble size");
    cmd->add_option("--level", o.level, "grid step = base / 2^level");
    cmd->add_option("--h", o.h_override, "grid step as a decimal (must be dyadic in the base)");
    cmd->add_option("--T-units,--T", o.t_units, "half range in base-period units");
    cmd->add_option("--gamma", o.gamma, "torus rotation number");
    cmd->add_option("--tol", o.tol, "pullback truncation tolerance (0 = full domain)");
    cmd->add_option("--out", o.out_dir, "output directory");
}

std::map<std::string, std::string> report_common(double sup, double mean, long n) {
    std::map<std::string, std::string> r;
    r["sup_residual"] = io::format_double(sup);
    r["mean_residual"] = io::format_double(mean);
    r["n_samples"] = std::to_string(n);
    return r;
}

int run_simulate(const CommonOpts& o, double t_end, double x0) {
    const double base = base_for(o.system);
    const auto grid = make_grid(o, base);
    const auto desc = descriptor_for(o);
    const auto path = noise::sample_path(o.seed, grid);
    const auto section = systems::reference_section(desc);

    systems::StatePoint state = [&]() -> systems::StatePoint {
        switch (desc.kind) {
            case systems::Kind::ou:
            case systems::Kind::pitchfork:
                return systems::real_point(x0);
            case systems::Kind::cylinder:
                return systems::cyl_point(0.0, x0);
            default:
                return systems::torus_point(x0, 0.0, 0.0);
        }
    }();
    std::string semantic;
    switch (desc.kind) {
        case systems::Kind::ou:
        case systems::Kind::pitchfork: semantic = "x"; break;
        case systems::Kind::cylinder: semantic = "alpha,rho"; break;
        default: semantic = "r,alpha,z"; break;
    }
    std::vector<std::string> names;
    for (long c = 0; c <= std::count(semantic.begin(), semantic.end(), ','); ++c) {
        names.push_back("component" + std::to_string(c + 1));
    }

    const auto k_end = grid.index_of(t_end);
    if (!k_end || *k_end < 0 || *k_end > path.max_index()) {
        throw CLI::ValidationError("--t-end", "end time must be a grid point within the domain");
    }
    std::vector<double> times;
    std::vector<std::vector<double>> traj, sect;
    for (long k = 0; k <= *k_end; ++k) {
        const double t = grid.time_at(k);
        times.push_back(t);
        traj.push_back(io::state_components(systems::apply_cocycle(desc, t, path, state)));
        sect.push_back(io::state_components(section.eval(t, path)));
    }
    const auto header = config_header(o, {{"t_end", io::format_double(t_end)},
                                          {"x0", io::format_double(x0)},
                                          {"h", io::format_double(grid.step())},
                                          {"components", semantic}});
    io::write_trajectory_csv(times, traj, names, out_path(o, "trajectory.csv"), header);
    io::write_trajectory_csv(times, sect, names, out_path(o, "section.csv"), header);
    std::map<std::string, std::string> manifest;
    manifest["path_seed"] = std::to_string(o.seed);
    manifest["files"] = "trajectory.csv,section.csv";
    io::write_report(manifest, out_path(o, "manifest.txt"), header);
    return 0;
}

int run_verify_cocycle(const CommonOpts& o, double threshold) {
    const double base = base_for(o.system);
    CommonOpts grid_opts = o;
    grid_opts.t_units = std::min(o.t_units, 8.0);
    const auto grid = make_grid(grid_opts, base);
    const auto desc = descriptor_for(o);
    if (threshold <= 0.0) threshold = desc.kind == systems::Kind::ou ? 1e-9 : 1e-3;
    const noise::NoiseEnsemble ens(o.seed, o.n_paths, grid);
    const auto matrix = verify::default_matrix(desc, base);
    const auto rep = verify::check_cocycle(desc, ens, matrix);
    auto out = report_common(rep.sup_residual, rep.mean_residual, rep.n_samples);
    out["threshold"] = io::format_double(threshold);
    out["passed"] = rep.sup_residual < threshold ? "yes" : "no";
    io::write_report(out, out_path(o, "verify_cocycle.txt"), config_header(o));
    std::printf("cocycle %s: sup=%s mean=%s (threshold %s)\n",
                rep.sup_residual < threshold ? "PASS" : "FAIL",
                io::format_double(rep.sup_residual).c_str(),
                io::format_double(rep.mean_residual).c_str(),
                io::format_double(threshold).c_str());
    return rep.sup_residual < threshold ? 0 : 1;
}

int run_verify_stationary(const CommonOpts& o, double threshold, const std::string& convention) {
    if (o.system != "ou" && o.system != "pitchfork") {
        throw CLI::ValidationError("--system", "stationary sections exist for ou and pitchfork");
    }
    const auto grid = make_grid(o, 1.0);
    const auto desc = descriptor_for(o);
    const noise::NoiseEnsemble ens(o.seed, o.n_paths, grid);
    systems::SolutionSection section;
    if (convention == "factor2") {
        section = systems::reference_section(desc);
    } else if (convention == "unscaled") {
        // regression guard: the unscaled radial pullback must keep failing
        section.desc = desc;
        section.eval = [tol = o.tol](double t, const noise::BrownianPath& p) -> systems::StatePoint {
            return systems::real_point(
                1.0 / std::sqrt(noise::pullback_exp_integral(noise::wiener_shift(p, t), 2.0, 2.0, tol)));
        };
    } else {
        throw CLI::ValidationError("--convention", "factor2 | unscaled");
    }
    const auto rep = verify::check_stationary(desc, section, ens,
                                              dyadic_times(1.0, {0.25, 0.5, 1.0, 1.5, 2.0}));
    auto out = report_common(rep.sup_residual, rep.mean_residual, rep.n_samples);
    out["threshold"] = io::format_double(threshold);
    out["convention"] = convention;
    out["passed"] = rep.sup_residual < threshold ? "yes" : "no";
    io::write_report(out, out_path(o, "verify_stationary.txt"), config_header(o));
    std::printf("stationary %s: sup=%s (threshold %s, %s)\n",
                rep.sup_residual < threshold ? "PASS" : "FAIL",
                io::format_double(rep.sup_residual).c_str(), io::format_double(threshold).c_str(),
                convention.c_str());
    return rep.sup_residual < threshold ? 0 : 1;
}

int run_verify_periodic(const CommonOpts& o, double tau_turns, double threshold) {
    CommonOpts opts = o;
    opts.system = "cylinder";
    const auto grid = make_grid(opts, kTwoPi);
    const auto desc = descriptor_for(opts);
    const noise::NoiseEnsemble ens(o.seed, o.n_paths, grid);
    const auto section = systems::reference_section(desc);
    const double tau = tau_turns * kTwoPi;
    const auto rep = verify::check_random_periodic(
        desc, section, tau, ens, dyadic_times(kTwoPi, {0.0, 0.25, 0.5, 1.0}),
        dyadic_times(kTwoPi, {0.25, 0.5, 1.0}));
    const bool ok = rep.flow.sup_residual < threshold && rep.shift.sup_residual < threshold;
    std::map<std::string, std::string> out;
    out["flow_sup"] = io::format_double(rep.flow.sup_residual);
    out["shift_sup"] = io::format_double(rep.shift.sup_residual);
    out["tau"] = io::format_double(tau);
    out["threshold"] = io::format_double(threshold);
    out["passed"] = ok ? "yes" : "no";
    io::write_report(out, out_path(o, "verify_periodic.txt"), config_header(opts));
    std::printf("periodic %s: flow=%s shift=%s tau=%s\n", ok ? "PASS" : "FAIL",
                io::format_double(rep.flow.sup_residual).c_str(),
                io::format_double(rep.shift.sup_residual).c_str(),
                io::format_double(tau).c_str());
    return ok ? 0 : 1;
}

int run_verify_rap(const CommonOpts& o, double epsilon, double window, double density_window) {
    CommonOpts opts = o;
    opts.system = "torus";
    if (opts.level > 6) opts.level = 6;  // deviations are grid-independent; keep paths light
    opts.t_units = std::max(opts.t_units, window + 8.0);
    const auto grid = make_grid(opts, 1.0);
    const auto desc = descriptor_for(opts);
    const noise::NoiseEnsemble ens(o.seed, std::min(o.n_paths, 8), grid);
    const auto section = systems::reference_section(desc);
    const auto taus = dio::almost_periods(o.gamma, epsilon, window);
    const auto cert = verify::check_rap(desc, section, epsilon, taus, ens,
                                        dyadic_times(1.0, {0.0, 0.5, 1.0, 2.0}),
                                        dyadic_times(1.0, {0.5, 1.0}));
    const auto scan = dio::almost_periods(o.gamma, epsilon, density_window);
    const auto density = dio::verify_relative_density(scan);
    const bool ok = cert.passed && density.ok;

    std::map<std::string, std::string> out;
    out["epsilon"] = io::format_double(epsilon);
    out["sup_deviation"] = io::format_double(cert.sup_deviation);
    out["worst_tau"] = io::format_double(cert.worst_tau);
    out["flow_sup"] = io::format_double(cert.flow.sup_residual);
    out["window"] = io::format_double(window);
    out["n_members"] = std::to_string(cert.tau_set.taus.size());
    out["density_window"] = io::format_double(density_window);
    out["density_inclusion_length"] = io::format_double(density.certified_length);
    out["passed"] = ok ? "yes" : "no";
    {
        std::ostringstream members;
        for (std::size_t i = 0; i < taus.taus.size(); ++i) {
            if (i) members << " ";
            members << io::format_double(taus.taus[i]);
        }
        out["members"] = members.str();
    }
    io::write_report(out, out_path(o, "verify_rap.txt"), config_header(opts));
    std::printf("rap %s: sup=%s at tau=%s, inclusion length %s on [0,%s]\n", ok ? "PASS" : "FAIL",
                io::format_double(cert.sup_deviation).c_str(),
                io::format_double(cert.worst_tau).c_str(),
                io::format_double(density.certified_length).c_str(),
                io::format_double(density_window).c_str());
    return ok ? 0 : 1;
}

int run_verify_thm43(const CommonOpts& o, double t1, double t2, double epsilon, double window) {
    CommonOpts opts = o;
    if (opts.level > 6) opts.level = 6;
    opts.t_units = std::max(opts.t_units, window + 8.0);
    const auto grid = make_grid(opts, 1.0);
    const auto g = systems::make_ou(o.tol);
    const auto prod = systems::product_cocycle(t1, t2, g);
    const noise::NoiseEnsemble ens(o.seed, std::min(o.n_paths, 8), grid);
    const auto taus =
        dio::almost_periods_torus_flow(t1, t2, epsilon / std::sqrt(2.0), window, 1.0);
    const auto rep = verify::check_thm43(prod, epsilon, taus, ens,
                                         dyadic_times(1.0, {0.0, 0.5, 1.0}));
    std::map<std::string, std::string> out;
    out["deterministic_sup"] = io::format_double(rep.deterministic_sup);
    out["random_sup"] = io::format_double(rep.random_sup);
    out["combined_sup"] = io::format_double(rep.combined_sup);
    out["epsilon"] = io::format_double(epsilon);
    out["passed"] = rep.passed ? "yes" : "no";
    if (rep.violating_tau) out["violating_tau"] = io::format_double(*rep.violating_tau);
    io::write_report(out, out_path(o, "verify_thm43.txt"), config_header(opts));
    std::printf("thm43 %s: det=%s rand=%s combined=%s\n", rep.passed ? "PASS" : "FAIL",
                io::format_double(rep.deterministic_sup).c_str(),
                io::format_double(rep.random_sup).c_str(),
                io::format_double(rep.combined_sup).c_str());
    return rep.passed ? 0 : 1;
}

int run_verify_thm45(const CommonOpts& o, double epsilon, const std::string& tau_list,
                     double h0_constant, bool use_constant) {
    if (o.system != "ou" && o.system != "pitchfork") {
        throw CLI::ValidationError("--system", "thm45 check runs on ou or pitchfork");
    }
    const auto grid = make_grid(o, 1.0);
    const auto desc = descriptor_for(o);
    const noise::NoiseEnsemble ens(o.seed, o.n_paths, grid);
    dio::AlmostPeriodSet taus;
    taus.epsilon = epsilon;
    {
        std::istringstream in(tau_list);
        std::string tok;
        while (std::getline(in, tok, ',')) taus.taus.push_back(std::strtod(tok.c_str(), nullptr));
        taus.deviations.assign(taus.taus.size(), 0.0);
        if (taus.taus.empty()) throw CLI::ValidationError("--tau-list", "needs at least one tau");
        taus.window = taus.taus.back();
        taus.inclusion_length = taus.window;
    }
    const auto ref = systems::reference_section(desc);
    const auto h0 = [&](const noise::BrownianPath& p) -> systems::StatePoint {
        if (use_constant) return systems::real_point(h0_constant);
        return ref.eval(0.0, p);
    };
    const auto rep = verify::check_thm45_condition(desc, h0, taus, epsilon, ens,
                                                   dyadic_times(1.0, {0.0, 0.5, 1.0}));
    std::map<std::string, std::string> out;
    out["condition_backward_sup"] = io::format_double(rep.condition_backward.sup_residual);
    out["condition_forward_sup"] = io::format_double(rep.condition_forward.sup_residual);
    out["conclusion_sup"] = io::format_double(rep.conclusion_sup);
    out["lipschitz"] = io::format_double(rep.lipschitz);
    out["bound"] = io::format_double(rep.bound);
    out["epsilon"] = io::format_double(epsilon);
    out["passed"] = rep.passed ? "yes" : "no";
    io::write_report(out, out_path(o, "verify_thm45.txt"), config_header(o));
    std::printf("thm45 %s: condition=%s conclusion=%s bound=%s\n", rep.passed ? "PASS" : "FAIL",
                io::format_double(rep.condition_backward.sup_residual).c_str(),
                io::format_double(rep.conclusion_sup).c_str(), io::format_double(rep.bound).c_str());
    return rep.passed ? 0 : 1;
}

int run_almost_periods(const CommonOpts& o, double epsilon, double window,
                       const std::string& out_file) {
    const auto set = dio::almost_periods(o.gamma, epsilon, window);
    std::ostringstream body;
    body << "tau,deviation\n";
    for (std::size_t i = 0; i < set.taus.size(); ++i) {
        body << io::format_double(set.taus[i]) << "," << io::format_double(set.deviations[i])
             << "\n";
    }
    body << "epsilon,inclusion_length,window\n";
    body << io::format_double(set.epsilon) << "," << io::format_double(set.inclusion_length) << ","
         << io::format_double(set.window) << "\n";
    if (out_file.empty()) {
        std::fputs(body.str().c_str(), stdout);
    } else {
        std::filesystem::create_directories(o.out_dir);
        std::ofstream f(o.out_dir + "/" + out_file);
        for (const auto& [k, v] : config_header(o, {{"epsilon", io::format_double(epsilon)},
                                                    {"window", io::format_double(window)}})) {
            f << "# " << k << "=" << v << "\n";
        }
        f << body.str();
    }
    return 0;
}

int run_measure_lambda(const CommonOpts& o, double t, const std::string& out_file) {
    const double base = base_for(o.system);
    const auto grid = make_grid(o, base);
    const auto desc = descriptor_for(o);
    const auto section = systems::reference_section(desc);
    const noise::NoiseEnsemble ens(o.seed, o.n_paths, grid);
    const auto lam = measures::lambda_t(desc, section, t, ens);
    io::write_measure_csv(lam, out_path(o, out_file),
                          config_header(o, {{"t", io::format_double(t)}}));
    return 0;
}

int run_measure_push_forward(const CommonOpts& o, double t, double s, double threshold) {
    const auto grid = make_grid(o, base_for(o.system));
    const auto desc = descriptor_for(o);
    const auto section = systems::reference_section(desc);
    const noise::NoiseEnsemble ens(o.seed, o.n_paths, grid);
    const noise::NoiseEnsemble fresh(noise::derive_seed(o.seed, 0xF5), o.n_paths, grid);
    const auto lam_s = measures::lambda_t(desc, section, s, ens);
    const auto lam_ts = measures::lambda_t(desc, section, t + s, ens);
    const auto pushed = measures::push_forward_kernel(desc, t, lam_s, fresh);
    const measures::BLConfig cfg;
    const auto metric = measures::phase_metric_for(desc);
    const double rho = measures::bl_distance(pushed, lam_ts, cfg, metric).distance;
    const auto band = measures::bootstrap_bl_distance(pushed, lam_ts, cfg, metric, 200,
                                                      noise::derive_seed(o.seed, 0xB0));
    std::map<std::string, std::string> out;
    out["rho1"] = io::format_double(rho);
    out["bootstrap_lo"] = io::format_double(band.lo);
    out["bootstrap_hi"] = io::format_double(band.hi);
    out["t"] = io::format_double(t);
    out["s"] = io::format_double(s);
    out["N"] = std::to_string(o.n_paths);
    const bool ok = rho <= threshold;
    out["passed"] = ok ? "yes" : "no";
    io::write_report(out, out_path(o, "measure_push_forward.txt"), config_header(o));
    std::printf("push-forward %s: rho1=%s band=[%s, %s]\n", ok ? "PASS" : "FAIL",
                io::format_double(rho).c_str(), io::format_double(band.lo).c_str(),
                io::format_double(band.hi).c_str());
    return ok ? 0 : 1;
}

int run_measure_ap_certificate(const CommonOpts& o, double epsilon, double window) {
    CommonOpts opts = o;
    opts.system = "torus";
    if (opts.level > 8) opts.level = 8;
    opts.t_units = std::max(opts.t_units, window + 8.0);
    const auto grid = make_grid(opts, 1.0);
    const auto desc = descriptor_for(opts);
    const auto section = systems::reference_section(desc);
    const int n = std::min(o.n_paths, 128);
    const noise::NoiseEnsemble ens(o.seed, n, grid);
    const noise::NoiseEnsemble fresh(noise::derive_seed(o.seed, 0xF5), n, grid);
    const auto taus = dio::almost_periods(o.gamma, epsilon, window);
    const measures::BLConfig cfg;
    const auto cert = measures::check_ap_measure(desc, section, epsilon, taus,
                                                 dyadic_times(1.0, {0.0, 1.0, 2.0}),
                                                 dyadic_times(1.0, {1.0}), ens, fresh, cfg, cfg);
    std::map<std::string, std::string> out;
    out["epsilon"] = io::format_double(epsilon);
    out["bootstrap_margin"] = io::format_double(cert.bootstrap_margin);
    out["n_phase_entries"] = std::to_string(cert.phase_shift.size());
    double worst_b = 0.0, worst_c = 0.0, worst_a = 0.0;
    for (const auto& e : cert.phase_shift) worst_b = std::max(worst_b, e.rho);
    for (const auto& e : cert.skew_shift) worst_c = std::max(worst_c, e.rho);
    for (const auto& e : cert.push_forward) worst_a = std::max(worst_a, e.rho);
    out["push_forward_sup"] = io::format_double(worst_a);
    out["phase_shift_sup"] = io::format_double(worst_b);
    out["skew_shift_sup"] = io::format_double(worst_c);
    out["passed"] = cert.passed ? "yes" : "no";
    io::write_report(out, out_path(o, "measure_ap_certificate.txt"), config_header(opts));
    std::printf("ap-certificate %s: phase sup=%s skew sup=%s margin=%s\n",
                cert.passed ? "PASS" : "FAIL", io::format_double(worst_b).c_str(),
                io::format_double(worst_c).c_str(),
                io::format_double(cert.bootstrap_margin).c_str());
    return cert.passed ? 0 : 1;
}

int run_bl_distance(const std::string& file_a, const std::string& file_b, double lip, double cap) {
    const auto mu = io::read_measure_csv(file_a);
    const auto nu = io::read_measure_csv(file_b);
    const auto& probe = mu.support.front();
    systems::SystemDescriptor desc;
    if (std::holds_alternative<systems::RealPoint>(probe)) {
        desc = systems::make_ou();
    } else if (std::holds_alternative<systems::CylPoint>(probe)) {
        desc = systems::make_cylinder();
    } else {
        desc = systems::make_torus(0.0);
    }
    const measures::BLConfig cfg{cap, lip};
    const auto res = measures::bl_distance(mu, nu, cfg, measures::phase_metric_for(desc));
    std::printf("%s\n", io::format_double(res.distance).c_str());
    return 0;
}

int run_sde_integrate(const CommonOpts& o, double t_end, int substeps, double x0,
                      const std::string& out_file) {
    const auto grid = make_grid(o, 1.0);
    const auto desc = descriptor_for(o);
    const auto spec = sde::catalog_sde(desc);
    const auto path = noise::sample_path(o.seed, grid);
    const auto traj = sde::euler_maruyama(spec, {x0}, path, t_end, substeps);
    io::write_trajectory_csv(traj.times, traj.states, {"component1"}, out_path(o, out_file),
                             config_header(o, {{"t_end", io::format_double(t_end)},
                                               {"substeps", std::to_string(substeps)},
                                               {"x0", io::format_double(x0)}}));
    return 0;
}

int run_sde_slope(const CommonOpts& o, const std::string& levels_list, double t_end) {
    std::vector<int> levels;
    {
        std::istringstream in(levels_list);
        std::string tok;
        while (std::getline(in, tok, ',')) levels.push_back(std::atoi(tok.c_str()));
    }
    CommonOpts fine = o;
    fine.level = 13;
    fine.t_units = std::max(4.0, t_end + 1.0);
    const auto grid = make_grid(fine, 1.0);
    const noise::NoiseEnsemble ens(o.seed, o.n_paths, grid);
    const auto desc = descriptor_for(o);
    const auto rep = sde::strong_error_slope(desc, ens, levels, t_end);
    std::map<std::string, std::string> out;
    out["slope"] = io::format_double(rep.slope);
    out["monotone"] = rep.monotone ? "yes" : "no";
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        out["error_level_" + std::to_string(rep.levels[i])] = io::format_double(rep.mean_errors[i]);
    }
    io::write_report(out, out_path(o, "sde_slope.txt"),
                     config_header(o, {{"t_end", io::format_double(t_end)}}));
    std::printf("slope %s: %s%s\n", o.system.c_str(), io::format_double(rep.slope).c_str(),
                rep.monotone ? "" : " (warning: non-monotone errors)");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random dynamical systems: simulation and certification toolkit"};
    app.require_subcommand(1);

    CommonOpts o;
    double t_end = 2.0, x0 = 1.0, epsilon = 0.05, window = 16.0, density_window = 10000.0;
    double tau_turns = 1.0, threshold = 0.0, t1 = 1.0, t2 = 1.0 / kSqrt2;
    double t_arg = 1.0, s_arg = 0.0, lip = 1.0, cap = 1.0, h0_constant = 1.0;
    int substeps = 1;
    std::string convention = "factor2", tau_list = "1,2,5", out_file, levels_list = "5,6,7,8,9";
    std::string file_a, file_b;
    bool h0_use_constant = false;

    auto* sim = app.add_subcommand("simulate", "closed-form trajectory and reference section");
    add_common(sim, o);
    sim->add_option("--t-end", t_end, "simulation end time");
    sim->add_option("--x0", x0, "initial value (radial component for cylinder/torus)");

    auto* ver = app.add_subcommand("verify", "numerical certification of the defining relations");
    ver->require_subcommand(1);
    auto* vc = ver->add_subcommand("cocycle", "cocycle law");
    add_common(vc, o);
    vc->add_option("--threshold", threshold, "pass threshold (default by system)");
    auto* vs = ver->add_subcommand("stationary", "stationarity of the reference section");
    add_common(vs, o);
    double st_threshold = 1e-9;
    vs->add_option("--threshold", st_threshold, "pass threshold");
    vs->add_option("--convention", convention, "factor2 | unscaled (regression guard)");
    auto* vp = ver->add_subcommand("periodic", "random periodicity of the cylinder section");
    add_common(vp, o, false);
    double per_threshold = 1e-6;
    vp->add_option("--tau-turns", tau_turns, "period in full turns of 2*pi");
    vp->add_option("--threshold", per_threshold, "pass threshold");
    auto* vr = ver->add_subcommand("rap", "random almost periodicity of the torus section");
    add_common(vr, o, false);
    vr->add_option("--epsilon", epsilon, "almost-period tolerance");
    vr->add_option("--window", window, "measured tau window [0, W]");
    vr->add_option("--density-window", density_window, "scan window for relative density");
    auto* v43 = ver->add_subcommand("thm43", "product construction hypotheses and conclusion");
    add_common(v43, o, false);
    v43->add_option("--t1", t1, "first flow period");
    v43->add_option("--t2", t2, "second flow period");
    v43->add_option("--epsilon", epsilon, "target deviation");
    v43->add_option("--window", window, "tau window");
    auto* v45 = ver->add_subcommand("thm45", "transported-initial-condition criterion");
    add_common(v45, o);
    v45->add_option("--epsilon", epsilon, "condition tolerance");
    v45->add_option("--tau-list", tau_list, "comma-separated almost periods");
    v45->add_option("--h0-constant", h0_constant, "use a constant initial value")
        ->each([&](const std::string&) { h0_use_constant = true; });

    auto* ap = app.add_subcommand("almost-periods", "Diophantine almost-period search");
    add_common(ap, o, false);
    ap->add_option("--epsilon", epsilon, "deviation bound");
    ap->add_option("--window", window, "integer window [0, W]");
    ap->add_option("--out-file", out_file, "write CSV here instead of stdout");

    auto* me = app.add_subcommand("measure", "empirical measures and their distances");
    me->require_subcommand(1);
    auto* ml = me->add_subcommand("lambda", "phase-space marginal at time t");
    add_common(ml, o);
    ml->add_option("--t", t_arg, "time");
    std::string lambda_file = "lambda.csv";
    ml->add_option("--out-file", lambda_file, "output CSV name");
    auto* mp = me->add_subcommand("push-forward", "transition push-forward identity");
    add_common(mp, o);
    mp->add_option("--t", t_arg, "transition time");
    mp->add_option("--s", s_arg, "measure time");
    double pf_threshold = 0.05;
    mp->add_option("--threshold", pf_threshold, "pass threshold on rho1");
    auto* mc = me->add_subcommand("ap-certificate", "almost periodic measure certificate");
    add_common(mc, o, false);
    mc->add_option("--epsilon", epsilon, "almost-period tolerance");
    mc->add_option("--window", window, "tau window");

    auto* bl = app.add_subcommand("bl-distance", "bounded-Lipschitz distance of two measure files");
    bl->add_option("fileA", file_a, "first measure CSV")->required();
    bl->add_option("fileB", file_b, "second measure CSV")->required();
    bl->add_option("--lip", lip, "Lipschitz constant");
    bl->add_option("--cap", cap, "sup bound");

    auto* sd = app.add_subcommand("sde", "Euler-Maruyama oracle");
    sd->require_subcommand(1);
    auto* si = sd->add_subcommand("integrate", "one trajectory on the driving path");
    add_common(si, o);
    si->add_option("--t-end", t_end, "end time");
    si->add_option("--substeps", substeps, "integrator substeps per grid step");
    si->add_option("--x0", x0, "initial value");
    std::string sde_file = "sde_trajectory.csv";
    si->add_option("--out-file", sde_file, "output CSV name");
    auto* ss = sd->add_subcommand("slope", "strong-error convergence slope");
    add_common(ss, o);
    ss->add_option("--levels", levels_list, "comma-separated dyadic levels");
    ss->add_option("--t-end", t_end, "comparison time");

    try {
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 vector parse expects reversed order
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    try {
        if (sim->parsed()) return run_simulate(o, t_end, x0);
        if (vc->parsed()) return run_verify_cocycle(o, threshold);
        if (vs->parsed()) return run_verify_stationary(o, st_threshold, convention);
        if (vp->parsed()) return run_verify_periodic(o, tau_turns, per_threshold);
        if (vr->parsed()) return run_verify_rap(o, epsilon, window, density_window);
        if (v43->parsed()) return run_verify_thm43(o, t1, t2, epsilon, window);
        if (v45->parsed()) return run_verify_thm45(o, epsilon, tau_list, h0_constant, h0_use_constant);
        if (ap->parsed()) return run_almost_periods(o, epsilon, window, out_file);
        if (ml->parsed()) return run_measure_lambda(o, t_arg, lambda_file);
        if (mp->parsed()) return run_measure_push_forward(o, t_arg, s_arg, pf_threshold);
        if (mc->parsed()) return run_measure_ap_certificate(o, epsilon, window);
        if (bl->parsed()) return run_bl_distance(file_a, file_b, lip, cap);
        if (si->parsed()) return run_sde_integrate(o, t_end, substeps, x0, sde_file);
        if (ss->parsed()) return run_sde_slope(o, levels_list, t_end);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}

#include "rds/csv.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace rds::io {

std::string format_double(double v) {
    char buf[40];
    // shortest representation that round-trips
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_header(std::ofstream& out, const Header& extra) {
    for (const auto& [k, v] : extra) out << "# " << k << "=" << v << "\n";
}

std::ofstream open_out(const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw std::runtime_error("cannot open for writing: " + filename);
    return out;
}

}  // namespace

void write_path_csv(const noise::BrownianPath& path, const std::string& filename,
                    const Header& extra) {
    auto out = open_out(filename);
    Header head;
    head.emplace_back("seed", std::to_string(path.seed()));
    head.emplace_back("h", format_double(path.grid().step()));
    head.emplace_back("base", format_double(path.grid().base()));
    head.emplace_back("level", std::to_string(path.grid().level()));
    head.emplace_back("T", format_double(path.grid().half_range()));
    head.emplace_back("origin_offset", format_double(path.origin_offset()));
    for (const auto& kv : extra) head.push_back(kv);
    write_header(out, head);
    out << "time,value\n";
    for (long k = path.min_index(); k <= path.max_index(); ++k) {
        out << format_double(path.grid().time_at(k)) << "," << format_double(path.value_at_index(k))
            << "\n";
    }
}

void write_ensemble_csv(const noise::NoiseEnsemble& ensemble, const std::string& directory,
                        const Header& extra) {
    std::filesystem::create_directories(directory);
    auto manifest = open_out(directory + "/manifest.txt");
    Header head;
    head.emplace_back("master_seed", std::to_string(ensemble.master_seed()));
    head.emplace_back("n_paths", std::to_string(ensemble.size()));
    head.emplace_back("h", format_double(ensemble.grid().step()));
    head.emplace_back("base", format_double(ensemble.grid().base()));
    head.emplace_back("T", format_double(ensemble.grid().half_range()));
    for (const auto& kv : extra) head.push_back(kv);
    for (const auto& [k, v] : head) manifest << k << "=" << v << "\n";
    for (int i = 0; i < ensemble.size(); ++i) {
        std::ostringstream name;
        name << directory << "/path_" << i << ".csv";
        manifest << "path_" << i << "_seed=" << ensemble.seed(i) << "\n";
        write_path_csv(ensemble.path(i), name.str(), extra);
    }
}

void write_trajectory_csv(const std::vector<double>& times,
                          const std::vector<std::vector<double>>& states,
                          const std::vector<std::string>& component_names,
                          const std::string& filename, const Header& extra) {
    if (times.size() != states.size()) {
        throw std::invalid_argument("write_trajectory_csv: times/states size mismatch");
    }
    auto out = open_out(filename);
    write_header(out, extra);
    out << "t";
    for (const auto& n : component_names) out << "," << n;
    out << "\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << format_double(times[i]);
        for (double v : states[i]) out << "," << format_double(v);
        out << "\n";
    }
}

std::vector<double> state_components(const systems::StatePoint& p) {
    if (const auto* r = std::get_if<systems::RealPoint>(&p)) return {r->x};
    if (const auto* c = std::get_if<systems::CylPoint>(&p)) return {c->alpha, c->rho};
    if (const auto* t = std::get_if<systems::TorusPoint>(&p)) return {t->r, t->alpha, t->z};
    const auto& q = std::get<systems::ProductPoint>(p);
    return {q.x, q.y, q.z};
}

void write_measure_csv(const measures::EmpiricalMeasure& mu, const std::string& filename,
                       const Header& extra) {
    measures::validate_measure(mu);
    auto out = open_out(filename);
    Header head = extra;
    if (mu.provenance_seed) head.emplace_back("provenance_seed", std::to_string(*mu.provenance_seed));
    write_header(out, head);
    const std::size_t n_comp = state_components(mu.support.front()).size();
    out << "weight";
    for (std::size_t c = 0; c < n_comp; ++c) out << ",component" << (c + 1);
    out << "\n";
    for (std::size_t i = 0; i < mu.support.size(); ++i) {
        out << format_double(mu.weights[i]);
        for (double v : state_components(mu.support[i])) out << "," << format_double(v);
        out << "\n";
    }
}

measures::EmpiricalMeasure read_measure_csv(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw std::runtime_error("cannot open for reading: " + filename);
    measures::EmpiricalMeasure mu;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {  // column header row
            saw_header = true;
            continue;
        }
        std::istringstream row(line);
        std::vector<double> vals;
        std::string cell;
        while (std::getline(row, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
        if (vals.empty()) continue;
        const double w = vals[0];
        switch (vals.size() - 1) {
            case 1:
                mu.support.push_back(systems::RealPoint{vals[1]});
                break;
            case 2:
                mu.support.push_back(systems::CylPoint{vals[1], vals[2]});
                break;
            case 3:
                mu.support.push_back(systems::TorusPoint{vals[1], vals[2], vals[3]});
                break;
            default:
                throw std::runtime_error("read_measure_csv: unsupported column count");
        }
        mu.weights.push_back(w);
    }
    measures::validate_measure(mu);
    return mu;
}

void write_report(const std::map<std::string, std::string>& keys, const std::string& filename,
                  const Header& extra) {
    auto out = open_out(filename);
    write_header(out, extra);
    for (const auto& [k, v] : keys) out << k << ": " << v << "\n";
}

}  // namespace rds::io

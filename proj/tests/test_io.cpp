#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rds/csv.hpp"

using namespace rds;

namespace {

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() : path(std::filesystem::temp_directory_path() / "rds_io_test") {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("format_double round-trips and prints dyadics exactly") {
    CHECK(io::format_double(0.0009765625) == "0.0009765625");
    CHECK(io::format_double(32.0) == "32");
    CHECK(io::format_double(0.0) == "0");
    for (double v : {1.0 / 3.0, 6.283185307179586, -0.1, 1e-300}) {
        CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("path csv carries seed, step and range in the header") {
    TempDir dir;
    const noise::TimeGrid g(1.0, 4, 2 << 4);
    const auto p = noise::sample_path(99, g);
    io::write_path_csv(p, dir.file("p.csv"));
    const auto text = slurp(dir.file("p.csv"));
    CHECK(text.find("# seed=99\n") != std::string::npos);
    CHECK(text.find("# h=0.0625\n") != std::string::npos);
    CHECK(text.find("# T=2\n") != std::string::npos);
    CHECK(text.find("time,value\n") != std::string::npos);
    // value at t=0 is the exact zero row
    CHECK(text.find("\n0,0\n") != std::string::npos);
}

TEST_CASE("ensemble directory holds one file per path plus a manifest") {
    TempDir dir;
    const noise::NoiseEnsemble ens(5, 3, noise::TimeGrid(1.0, 3, 1 << 3));
    io::write_ensemble_csv(ens, dir.file("ens"));
    CHECK(std::filesystem::exists(dir.file("ens/manifest.txt")));
    for (int i = 0; i < 3; ++i) {
        CHECK(std::filesystem::exists(dir.file("ens/path_" + std::to_string(i) + ".csv")));
    }
    const auto manifest = slurp(dir.file("ens/manifest.txt"));
    CHECK(manifest.find("master_seed=5") != std::string::npos);
    CHECK(manifest.find("path_2_seed=" + std::to_string(ens.seed(2))) != std::string::npos);
}

TEST_CASE("measure csv round-trips weights and points bitwise") {
    TempDir dir;
    measures::EmpiricalMeasure mu;
    mu.support = {systems::torus_point(0.5, 0.25, -0.125), systems::torus_point(1.5, 0.0, 0.375)};
    mu.weights = {0.25, 0.75};
    io::write_measure_csv(mu, dir.file("m.csv"));
    const auto back = io::read_measure_csv(dir.file("m.csv"));
    REQUIRE(back.support.size() == 2);
    CHECK(back.weights[0] == 0.25);
    CHECK(back.weights[1] == 0.75);
    const auto& p0 = std::get<systems::TorusPoint>(back.support[0]);
    CHECK(p0.r == 0.5);
    CHECK(p0.alpha == 0.25);
    CHECK(p0.z == -0.125);
}

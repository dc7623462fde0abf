#pragma once

#include <map>
#include <string>
#include <vector>

#include "rds/bl.hpp"
#include "rds/noise.hpp"
#include "rds/systems.hpp"

namespace rds::io {

/// Shortest decimal round-trip formatting ("%.17g" fallback): outputs are
/// bitwise-reproducible across runs.
std::string format_double(double v);

/// Ordered key=value pairs embedded as `# key=value` header comments in
/// every output file.
using Header = std::vector<std::pair<std::string, std::string>>;

void write_path_csv(const noise::BrownianPath& path, const std::string& filename,
                    const Header& extra = {});

/// One file per path plus a manifest listing seeds and the grid.
void write_ensemble_csv(const noise::NoiseEnsemble& ensemble, const std::string& directory,
                        const Header& extra = {});

void write_trajectory_csv(const std::vector<double>& times,
                          const std::vector<std::vector<double>>& states,
                          const std::vector<std::string>& component_names,
                          const std::string& filename, const Header& extra = {});

void write_measure_csv(const measures::EmpiricalMeasure& mu, const std::string& filename,
                       const Header& extra = {});

/// Reads `weight,component1,...` rows; the state kind is inferred from the
/// column count (1 real, 2 cylinder, 3 torus).
measures::EmpiricalMeasure read_measure_csv(const std::string& filename);

void write_report(const std::map<std::string, std::string>& keys, const std::string& filename,
                  const Header& extra = {});

std::vector<double> state_components(const systems::StatePoint& p);

}  // namespace rds::io

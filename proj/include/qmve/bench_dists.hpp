#pragma once

#include <string>
#include <vector>

#include "qmve/prob.hpp"

namespace qmve {

// Bundled benchmark distributions used by the validation and acceptance
// suites; data/<name>.json carries the same tables for CLI use.
FiniteDist bench_dist(const std::string& name);
std::vector<std::string> bench_dist_names();

}  // namespace qmve

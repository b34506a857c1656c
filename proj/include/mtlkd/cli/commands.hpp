#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace mtlkd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

// One invocation, args excluding the program name. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// (obj - base) / base.
double gap(double objective, double baseline);

// Baseline sidecar: one objective per line in dataset order.
std::vector<double> read_baseline(const std::string& path);
void write_baseline(const std::string& path, const std::vector<double>& objectives);
// Optima sidecar: "<instance name> <objective>" per line.
std::map<std::string, double> read_optima(const std::string& path);

}  // namespace mtlkd::cli

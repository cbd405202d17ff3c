#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace sgfem::tools {

/// Everything a command needs; written next to the outputs as config.json
/// and accepted back through --config.
struct RunConfig {
  std::string command;
  int dim = 2;
  std::string example = "smooth";
  double lambda = 10.0;
  double mu = 1.0;
  /// Empty: the command's default sweep.
  std::vector<double> iota;
  int levels = 5;
  int n = 0;  // 0: 8 in 2D, 4 in 3D (convergence start / solve mesh)
  std::string solver = "auto";
  double tol = 1e-10;
  std::string out;
  std::uint64_t seed = 20240917;
  std::string suite = "all";
  std::size_t samples = 100000;
  bool zero_load = false;
  bool allow_large = false;
  bool audit = false;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

/// Throws sgfem::Error describing the first invalid field.
void validate(const RunConfig& c);

/// Resolved iota values for the command.
std::vector<double> iota_values(const RunConfig& c);
int initial_resolution(const RunConfig& c);

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int cmd_convergence(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err);

/// Validates and dispatches on c.command.
int run_config(const RunConfig& c, std::ostream& out, std::ostream& err);

/// Parses the command line and runs it.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sgfem::tools

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ostrovsky/io.hpp"

namespace ostrovsky {

struct EvolveConfig {
  double T = 10.0;
  double dt = 1e-3;
  double delta = 1e-3;
  std::optional<std::uint64_t> seed;
};

struct RunConfig {
  std::string command;
  Family family = Family::SignedPower;
  double p = 2.0;
  std::vector<double> lambdas;
  GridSpec grid;
  SolverOptions solver;
  EvolveConfig evolve;
  bool full_spectrum = true;
  std::string out_dir;
};

const std::vector<std::string>& command_names();

// Fields absent from j keep the values already in cfg.  Usage on unknown keys or bad types.
void merge_config_json(RunConfig& cfg, const json& j);
json config_to_json(const RunConfig& cfg);

// Range and consistency checks; raises the module error (InvalidExponent, Usage, ...).
void validate_config(const RunConfig& cfg);

struct VerificationRow {
  std::string family;
  double p = 0.0;
  double lambda = 0.0;
  double omega = 0.0;
  double m_value = 0.0;
  double el_residual_2 = 0.0;
  double el_residual_4 = 0.0;
  double pohozaev_r1 = 0.0;
  double pohozaev_r2 = 0.0;
  double pohozaev4_r1 = 0.0;
  double pohozaev4_r2 = 0.0;
  double kappa_fit = 0.0;
  double kappa_ref = 0.0;
  double kappa_rel_dev = 0.0;
  int n_minus = 0;
  int kernel_dim = 0;
  double kernel_overlap = 0.0;
  double vk_value = 0.0;
  double max_real_full = 0.0;
  std::string verdict;
  std::optional<double> evolve_ratio;
  bool pass = false;
  std::string failure;  // module error of a cell that could not be computed
};

std::string verification_table_csv(const std::vector<VerificationRow>& rows);

// Exit status: 0 all checks pass, 1 verification failure, 2 usage error, 3 numerical failure.
int exit_code_for(ErrorCode code);
int run_config(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ostrovsky

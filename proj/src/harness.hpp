#pragma once

// Experiment orchestration: Hölder-constant estimation for the data-to-
// gradient solution map, regularity tables over graded data families,
// boundedness/homogeneity checks, and norm-identification sweeps. Outputs are
// deterministic for a fixed (config, seed) and serialize to CSV or JSON.

#include <cstdint>
#include <string>
#include <vector>

#include "families.hpp"
#include "interp.hpp"
#include "solver.hpp"
#include "spaces.hpp"

namespace rispace {

struct ExperimentConfig {
  std::string experiment = "holder";  // holder | table | bounds | verify
  // holder: weak | dual | lipschitz     table: lorentz | theta0 | lipschitz
  // bounds: uniform | gradient          verify: identification | embedding | equivalence
  std::string variant = "weak";
  double p = 2.0;
  int dim = 2;
  std::vector<int> levels = {32, 48};  // grid resolutions (cells per axis)
  PotentialSpec potential;
  int samples = 50;
  std::uint64_t seed = 1;
  double solver_tol = 1e-10;
  double k = 0.0;       // source Lorentz primary exponent (table variants)
  double r = 1.0;       // source secondary exponent
  double lambda = 0.0;  // logarithmic exponent (theta0 variant)
  // For p >= dim the Sobolev exponent is unconstrained; any finite stand-in
  // is admissible. 0 picks the default 3p.
  double pstar_override = 0.0;
  CoupleSpec couple;    // verify: identification
  InterpParams params;
  SpaceSpec src, tgt;   // verify: embedding / equivalence
  int family_size = 40;
  double budget = 1e3;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

std::uint64_t config_hash(const ExperimentConfig& c);

struct ExperimentRow {
  std::string experiment;
  std::uint64_t config_hash = 0;
  int sample_id = 0;
  double norm_src = 0.0;
  double norm_tgt = 0.0;
  double ratio = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  nlohmann::json summary;
  bool pass = false;

  // CSV schema: experiment,config_hash,sample_id,norm_src,norm_tgt,ratio,pass,seconds
  // with_seconds=false zeroes the timing column so payloads compare bit-identically.
  std::string csv(bool with_seconds = true) const;
  nlohmann::json to_json_payload(bool with_seconds = true) const;
};

ExperimentResult run_holder_experiment(const ExperimentConfig& cfg);
ExperimentResult run_regularity_table(const ExperimentConfig& cfg);
ExperimentResult run_bound_check(const ExperimentConfig& cfg);
ExperimentResult run_verify(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// np/(n-p) for p < n; for p >= n any finite value works (override or 3p).
double effective_pstar(double p, int n, double override_value);

}  // namespace rispace

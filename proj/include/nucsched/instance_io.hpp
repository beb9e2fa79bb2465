#pragma once

#include <string>

#include "nucsched/domain.hpp"

namespace nucsched {

struct GeneratorConfig {
  unsigned seed = 1;
  int n_t2 = 2;                  // nuclear units
  int n_t1 = 1;                  // flexible units
  int n_cycles = 2;              // cycles per nuclear unit
  int weeks = 30;
  int tw_width = 2;              // outage window half-width around the reference week
  double demand_base = 0.85;     // base load as fraction of total nuclear capacity
  double demand_amplitude = 0.1; // seasonal swing as fraction of base
  double cost_spread = 0.5;      // relative spread of refuel costs
  int n_resource_constraints = 0;
  bool optional_tail = false;    // make the last cycle of each unit optional
};

struct DerivationSpec {
  enum class Kind { ext, truncate } kind = Kind::ext;
  int k0 = 1;       // ext: cycles beyond k0 lose their window
  int k_keep = 1;   // truncate
  int w_keep = 1;   // truncate
};

// Parses the JSON instance document. Reports syntax errors with position and
// semantic errors with a field path.
ProblemInstance parse_instance(const std::string& text);
std::string write_instance(const ProblemInstance& instance);

// Solution round-trip. Reading needs the instance for array shapes.
std::string write_solution(const Solution& solution, const ProblemInstance& instance);
Solution parse_solution(const std::string& text, const ProblemInstance& instance);

// Builds a synthetic instance that is feasible by construction: a reference
// schedule is laid out first, then windows, stocks, resource capacities and
// T1 capacity are sized around it. Deterministic in the seed.
ProblemInstance generate(const GeneratorConfig& config);

// ext(K0): cycles k > K0 keep only physical ordering (window removed, outage
// optional). truncate(K, W): drop later cycles and weeks.
ProblemInstance derive(const ProblemInstance& instance, const DerivationSpec& spec);

// Sum over outages of the number of free beginning weeks.
long count_free_binaries(const ProblemInstance& instance);

}  // namespace nucsched

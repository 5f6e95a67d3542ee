#pragma once

// The invariant suite run by `ifsm verify`.

#include <cstdint>
#include <string>
#include <vector>

#include "ifsm/grid.hpp"
#include "ifsm/model.hpp"

namespace ifsm {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;  ///< measured quantity
  double bound = 0.0;  ///< what it was compared against
  std::string detail;
};

struct VerifyOptions {
  Interpolation interpolation = Interpolation::multilinear;
  double tol = 1e-12;
  int duality_pairs = 100;
  int gelfand_max = 200;
  std::size_t orbit_length = 10000;
  std::uint64_t seed = 1;
};

/// Duality, spectral bounds, Gelfand rate, entropy inequalities, the
/// variational bound, holonomy of the equilibrium lift, exact
/// disintegration, orbit validity, telescoping and determinism. Numeric
/// failures (no convergence) propagate as exceptions.
std::vector<CheckResult> run_invariant_suite(const SystemSpec& spec, const Grid& grid, const VerifyOptions& options = {});

std::string format_checks(const std::vector<CheckResult>& checks);

}  // namespace ifsm

#pragma once

#include <string>
#include <vector>

#include "perifront/model.hpp"

namespace perifront {

struct PropertyCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct ValidationOptions {
  double eig_tol = 1e-11;
  double lambda_max = 3.0;
  double lambda_step = 0.1;
  /// Offset used for the ordered-media comparisons.
  double offset = 0.1;
  bool include_stationary = true;
  bool include_speed = true;
};

/// Property battery on a single problem: hypotheses, eigenvalue structure,
/// stationary uniqueness and minimal-speed consistency.
std::vector<PropertyCheck> run_property_battery(const Problem& problem,
                                                const ValidationOptions& options = {});

}  // namespace perifront

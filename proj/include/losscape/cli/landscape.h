#pragma once

#include <ostream>
#include <vector>

#include "losscape/formula.h"
#include "losscape/losses.h"

namespace losscape::cli {

struct LandscapeOptions {
  LossSpec loss;
  int resolution = 201;  // grid points per axis, spanning [0, 1]
};

struct LandscapePoint {
  int i = 0, j = 0;  // grid indices of mu_0 and mu_1
  double mu0 = 0.0, mu1 = 0.0, loss = 0.0;
};

// Loss of the independent distribution at every grid point, mu_0 outermost.
// Throws InvalidArgument unless the formula has exactly two variables.
std::vector<LandscapePoint> landscape_grid(const Formula& f,
                                           const LandscapeOptions& opts);

void write_landscape_csv(std::ostream& out,
                         const std::vector<LandscapePoint>& grid);

}  // namespace losscape::cli

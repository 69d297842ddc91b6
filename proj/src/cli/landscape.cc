#include "losscape/cli/landscape.h"

#include <cmath>
#include <cstdio>

#include "losscape/distributions.h"

namespace losscape::cli {

std::vector<LandscapePoint> landscape_grid(const Formula& f,
                                           const LandscapeOptions& opts) {
  if (f.n() != 2) throw InvalidArgument("landscapes need exactly 2 variables");
  if (opts.resolution < 2) throw InvalidArgument("resolution must be >= 2");
  opts.loss.validate();
  const TruthTable table(f);
  const int res = opts.resolution;
  std::vector<LandscapePoint> grid;
  grid.reserve(static_cast<std::size_t>(res) * static_cast<std::size_t>(res));
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      LandscapePoint pt{i, j, static_cast<double>(i) / (res - 1),
                        static_cast<double>(j) / (res - 1), 0.0};
      const IndependentParams mu({pt.mu0, pt.mu1});
      if (opts.loss.kind == LossKind::kFuzzy) {
        pt.loss = fuzzy_loss(f, mu, opts.loss.logic, opts.loss.form);
      } else {
        pt.loss = dense_loss(table, densify(mu), opts.loss);
      }
      grid.push_back(pt);
    }
  }
  return grid;
}

void write_landscape_csv(std::ostream& out,
                         const std::vector<LandscapePoint>& grid) {
  out << "mu_0,mu_1,loss\n";
  char buf[96];
  for (const auto& pt : grid) {
    if (std::isinf(pt.loss)) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,inf\n", pt.mu0, pt.mu1);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", pt.mu0, pt.mu1, pt.loss);
    }
    out << buf;
  }
}

}  // namespace losscape::cli

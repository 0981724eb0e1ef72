#include "synlin/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "synlin/random.h"

namespace synlin {

double RelativeError(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  const double diff = std::abs(analytic - numeric);
  if (scale < 1e-10) return diff;
  return diff / scale;
}

GradCheckReport CheckGradients(const TensorList &params, const TensorList &analytic,
                               const std::function<double()> &loss, double epsilon,
                               int samples, std::uint64_t seed) {
  Rng rng(seed);
  GradCheckReport report;
  for (size_t t = 0; t < params.size(); ++t) {
    Matrix &w = *params[t].value;
    const Matrix &g = *analytic[t].value;
    const long size = static_cast<long>(w.size());
    if (size == 0) continue;

    std::vector<long> coords;
    if (size <= samples) {
      coords.resize(size);
      std::iota(coords.begin(), coords.end(), 0L);
    } else {
      for (int k = 0; k < samples; ++k) coords.push_back(static_cast<long>(rng.Below(size)));
    }
    for (long index : coords) {
      double &x = w.data()[index];
      const double saved = x;
      x = saved + epsilon;
      const double up = loss();
      x = saved - epsilon;
      const double down = loss();
      x = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double error = RelativeError(g.data()[index], numeric);
      ++report.coordinates;
      if (report.worst_index < 0 || error > report.max_relative_error) {
        report.max_relative_error = error;
        report.worst_tensor = params[t].name;
        report.worst_index = index;
      }
    }
  }
  return report;
}

}  // namespace synlin

// Central-difference gradient verification.

#ifndef SYNLIN_GRAD_CHECK_H_
#define SYNLIN_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <string>

#include "synlin/tensor.h"

namespace synlin {

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_tensor;
  long worst_index = -1;
  int coordinates = 0;
};

// |a - n| / max(|a|, |n|); 0 when both are exactly zero. Below 1e-10 in
// magnitude the absolute difference is returned instead, since a relative
// error there only measures round-off.
double RelativeError(double analytic, double numeric);

// Perturbs each sampled coordinate of `params` by +/- epsilon, evaluates
// `loss`, and compares (f(w+e) - f(w-e)) / 2e with `analytic` (same layout).
// Tensors with at most `samples` coordinates are checked exhaustively.
// Parameters are restored exactly afterwards.
GradCheckReport CheckGradients(const TensorList &params, const TensorList &analytic,
                               const std::function<double()> &loss, double epsilon,
                               int samples, std::uint64_t seed);

}  // namespace synlin

#endif  // SYNLIN_GRAD_CHECK_H_

#include "synlin/tensor.h"

#include <stdexcept>

#include "synlin/random.h"

namespace synlin {

double SquaredNorm(const TensorList &tensors) {
  double total = 0.0;
  for (const NamedTensor &t : tensors) total += t.value->squaredNorm();
  return total;
}

void SetZero(const TensorList &tensors) {
  for (const NamedTensor &t : tensors) t.value->setZero();
}

void FillUniform(const TensorList &tensors, double range, Rng *rng) {
  for (const NamedTensor &t : tensors) {
    Matrix &m = *t.value;
    // Column-major fill order is part of the reproducibility contract.
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng->Uniform(-range, range);
    }
  }
}

Adagrad::Adagrad(const TensorList &params, double learning_rate, double epsilon)
    : learning_rate_(learning_rate), epsilon_(epsilon) {
  for (const NamedTensor &t : params) {
    accumulators_.push_back(Matrix::Zero(t.value->rows(), t.value->cols()));
  }
}

void Adagrad::Step(const TensorList &params, const TensorList &grads) {
  if (params.size() != accumulators_.size() || grads.size() != params.size()) {
    throw std::invalid_argument("Adagrad: tensor list mismatch");
  }
  for (size_t k = 0; k < params.size(); ++k) {
    Matrix &w = *params[k].value;
    const Matrix &g = *grads[k].value;
    Matrix &acc = accumulators_[k];
    acc.array() += g.array().square();
    w.array() -= learning_rate_ * g.array() / (acc.array().sqrt() + epsilon_);
  }
}

}  // namespace synlin

// Named parameter tensors and the Adagrad optimizer shared by both networks.

#ifndef SYNLIN_TENSOR_H_
#define SYNLIN_TENSOR_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace synlin {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct NamedTensor {
  std::string name;
  Matrix *value;
};
using TensorList = std::vector<NamedTensor>;

double SquaredNorm(const TensorList &tensors);
void SetZero(const TensorList &tensors);
void FillUniform(const TensorList &tensors, double range, class Rng *rng);

// Per-coordinate Adagrad: acc += g^2; w -= lr * g / (sqrt(acc) + eps).
class Adagrad {
 public:
  Adagrad(const TensorList &params, double learning_rate, double epsilon);
  void Step(const TensorList &params, const TensorList &grads);

 private:
  double learning_rate_;
  double epsilon_;
  std::vector<Matrix> accumulators_;
};

}  // namespace synlin

#endif  // SYNLIN_TENSOR_H_

#pragma once

#include <vector>

namespace tidp::nn {

/// Mean squared error over all elements; if grad is non-null it receives
/// d(loss)/d(pred) = 2 (pred - target) / n.
double mse(const std::vector<double>& pred, const std::vector<double>& target,
           std::vector<double>* grad = nullptr);

/// Softmax cross-entropy of one row of logits against a class index; if grad
/// is non-null it receives d(loss)/d(logits) = softmax - onehot.
double softmax_cross_entropy(const std::vector<double>& logits, int target_index,
                             std::vector<double>* grad = nullptr);

std::vector<double> softmax(const std::vector<double>& logits);

}  // namespace tidp::nn

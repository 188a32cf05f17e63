#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "tidp/nn/layers.hpp"

namespace tidp::nn {

class Optimizer {
public:
    virtual ~Optimizer() = default;
    virtual void step(const std::vector<ParamBlock>& blocks) = 0;
};

class Sgd final : public Optimizer {
public:
    explicit Sgd(double lr) : lr_(lr) {}
    void step(const std::vector<ParamBlock>& blocks) override;

private:
    double lr_;
};

/// Adam with bias correction. Moment state is keyed by block position, so the
/// same block list must be passed on every step.
class Adam final : public Optimizer {
public:
    explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
    void step(const std::vector<ParamBlock>& blocks) override;

private:
    double lr_, beta1_, beta2_, eps_;
    std::int64_t t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

}  // namespace tidp::nn

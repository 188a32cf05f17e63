#pragma once

#include <string_view>

namespace tidp::nn {

enum class Activation { identity, relu, elu, tanh, sigmoid };

Activation activation_from_string(std::string_view name);
const char* to_string(Activation act);

/// Elementwise activation of a pre-activation value.
double activate(Activation act, double x);

/// Derivative with respect to the pre-activation value. relu uses 0 at x == 0;
/// elu uses alpha = 1.
double activate_grad(Activation act, double x);

}  // namespace tidp::nn

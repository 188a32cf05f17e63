#pragma once

#include <cstddef>
#include <vector>

#include "tidp/matrix.hpp"
#include "tidp/nn/activation.hpp"
#include "tidp/rng.hpp"

namespace tidp::nn {

/// A trainable parameter vector paired with its gradient accumulator.
struct ParamBlock {
    std::vector<double>* values = nullptr;
    std::vector<double>* grads = nullptr;
};

void zero_grads(const std::vector<ParamBlock>& blocks);

/// Fully connected layer, weights row-major (out x in). Weight init is
/// uniform(-s, s) with s = 1/sqrt(in); biases start at zero.
struct Dense {
    int in = 0;
    int out = 0;
    Activation act = Activation::identity;
    std::vector<double> w, b;
    std::vector<double> gw, gb;

    Dense() = default;
    Dense(int n_in, int n_out, Activation a);

    void init(Rng& rng);

    /// pre and post must each hold `out` values.
    void forward(const double* x, double* pre, double* post) const;

    /// Accumulates weight gradients from d(loss)/d(post) and writes
    /// d(loss)/d(x) into grad_in (length `in`) unless null.
    void backward(const double* x, const double* pre, const double* grad_post, double* grad_in);

    std::vector<ParamBlock> param_blocks();
};

/// A stack of Dense layers evaluated on single vectors.
struct Mlp {
    std::vector<Dense> layers;

    void init(Rng& rng);
    int input_size() const { return layers.empty() ? 0 : layers.front().in; }
    int output_size() const { return layers.empty() ? 0 : layers.back().out; }

    std::vector<double> forward(const std::vector<double>& x) const;

    /// Forward pass keeping every layer's pre/post activations for backward.
    struct Trace {
        std::vector<std::vector<double>> pre;
        std::vector<std::vector<double>> post;
    };
    const std::vector<double>& forward_trace(const std::vector<double>& x, Trace& trace) const;

    /// Backpropagates d(loss)/d(output); accumulates parameter gradients and
    /// writes d(loss)/d(input) into grad_in unless null.
    void backward(const std::vector<double>& x, const Trace& trace,
                  const std::vector<double>& grad_out, std::vector<double>* grad_in);

    std::vector<ParamBlock> param_blocks();
};

/// Single-layer LSTM scanned over a sequence; only the final hidden state
/// feeds downstream, so backward takes d(loss)/d(h_T). Gates are stacked in
/// i, f, g, o order; the forget-gate bias starts at +1, everything else at
/// uniform(-s, s) with s = 1/sqrt(input + hidden).
struct Lstm {
    int input = 0;
    int hidden = 0;
    std::vector<double> w, b;  // w: (4*hidden) x (input + hidden) row-major
    std::vector<double> gw, gb;

    Lstm() = default;
    Lstm(int n_input, int n_hidden);

    void init(Rng& rng);

    struct Trace {
        int steps = 0;
        // per step: activated gates (4*hidden, i f g o), cell state, tanh(cell)
        std::vector<std::vector<double>> gates;
        std::vector<std::vector<double>> cell;
        std::vector<std::vector<double>> cell_tanh;
        std::vector<std::vector<double>> h;  // h[t] after step t
    };

    /// x_seq is steps x input; h_0 = c_0 = 0. Returns h_T. trace may be null
    /// for inference.
    std::vector<double> forward(const Dense2D& x_seq, Trace* trace) const;

    /// Full backpropagation through time from d(loss)/d(h_T).
    void backward(const Dense2D& x_seq, const Trace& trace, const std::vector<double>& grad_hT);

    std::vector<ParamBlock> param_blocks();
};

}  // namespace tidp::nn

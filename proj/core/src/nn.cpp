#include <algorithm>
#include <cmath>
#include <string>

#include "tidp/errors.hpp"
#include "tidp/nn/activation.hpp"
#include "tidp/nn/layers.hpp"
#include "tidp/nn/loss.hpp"
#include "tidp/nn/optimizer.hpp"

namespace tidp::nn {

Activation activation_from_string(std::string_view name) {
    if (name == "identity") return Activation::identity;
    if (name == "relu") return Activation::relu;
    if (name == "elu") return Activation::elu;
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    throw ConfigError("unknown activation: " + std::string(name));
}

const char* to_string(Activation act) {
    switch (act) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::elu: return "elu";
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
    }
    return "identity";
}

double activate(Activation act, double x) {
    switch (act) {
        case Activation::identity: return x;
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::elu: return x > 0.0 ? x : std::expm1(x);
        case Activation::tanh: return std::tanh(x);
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    }
    return x;
}

double activate_grad(Activation act, double x) {
    switch (act) {
        case Activation::identity: return 1.0;
        case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::elu: return x > 0.0 ? 1.0 : std::exp(x);
        case Activation::tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Activation::sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s);
        }
    }
    return 1.0;
}

void zero_grads(const std::vector<ParamBlock>& blocks) {
    for (const auto& block : blocks) std::fill(block.grads->begin(), block.grads->end(), 0.0);
}

Dense::Dense(int n_in, int n_out, Activation a) : in(n_in), out(n_out), act(a) {
    if (n_in < 1 || n_out < 1) throw DimensionError("dense layer needs positive dimensions");
    w.assign(static_cast<std::size_t>(in) * out, 0.0);
    b.assign(static_cast<std::size_t>(out), 0.0);
    gw.assign(w.size(), 0.0);
    gb.assign(b.size(), 0.0);
}

void Dense::init(Rng& rng) {
    const double s = 1.0 / std::sqrt(static_cast<double>(in));
    for (auto& v : w) v = rng.uniform(-s, s);
    std::fill(b.begin(), b.end(), 0.0);
}

void Dense::forward(const double* x, double* pre, double* post) const {
    for (int o = 0; o < out; ++o) {
        const double* row = w.data() + static_cast<std::size_t>(o) * in;
        double acc = b[static_cast<std::size_t>(o)];
        for (int i = 0; i < in; ++i) acc += row[i] * x[i];
        pre[o] = acc;
        post[o] = activate(act, acc);
    }
}

void Dense::backward(const double* x, const double* pre, const double* grad_post,
                     double* grad_in) {
    if (grad_in != nullptr) std::fill(grad_in, grad_in + in, 0.0);
    for (int o = 0; o < out; ++o) {
        const double d = grad_post[o] * activate_grad(act, pre[o]);
        gb[static_cast<std::size_t>(o)] += d;
        double* grow = gw.data() + static_cast<std::size_t>(o) * in;
        const double* wrow = w.data() + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) {
            grow[i] += d * x[i];
            if (grad_in != nullptr) grad_in[i] += d * wrow[i];
        }
    }
}

std::vector<ParamBlock> Dense::param_blocks() { return {{&w, &gw}, {&b, &gb}}; }

void Mlp::init(Rng& rng) {
    for (auto& layer : layers) layer.init(rng);
}

std::vector<double> Mlp::forward(const std::vector<double>& x) const {
    std::vector<double> current = x;
    std::vector<double> pre, post;
    for (const auto& layer : layers) {
        if (static_cast<int>(current.size()) != layer.in)
            throw DimensionError("mlp input size mismatch");
        pre.resize(static_cast<std::size_t>(layer.out));
        post.resize(static_cast<std::size_t>(layer.out));
        layer.forward(current.data(), pre.data(), post.data());
        current = post;
    }
    return current;
}

const std::vector<double>& Mlp::forward_trace(const std::vector<double>& x, Trace& trace) const {
    trace.pre.assign(layers.size(), {});
    trace.post.assign(layers.size(), {});
    const std::vector<double>* current = &x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Dense& layer = layers[l];
        if (static_cast<int>(current->size()) != layer.in)
            throw DimensionError("mlp input size mismatch");
        trace.pre[l].resize(static_cast<std::size_t>(layer.out));
        trace.post[l].resize(static_cast<std::size_t>(layer.out));
        layer.forward(current->data(), trace.pre[l].data(), trace.post[l].data());
        current = &trace.post[l];
    }
    return *current;
}

void Mlp::backward(const std::vector<double>& x, const Trace& trace,
                   const std::vector<double>& grad_out, std::vector<double>* grad_in) {
    std::vector<double> grad = grad_out;
    std::vector<double> next;
    for (std::size_t l = layers.size(); l-- > 0;) {
        Dense& layer = layers[l];
        const double* input = l == 0 ? x.data() : trace.post[l - 1].data();
        const bool want_input_grad = l > 0 || grad_in != nullptr;
        next.resize(static_cast<std::size_t>(layer.in));
        layer.backward(input, trace.pre[l].data(), grad.data(),
                       want_input_grad ? next.data() : nullptr);
        grad = next;
    }
    if (grad_in != nullptr) *grad_in = grad;
}

std::vector<ParamBlock> Mlp::param_blocks() {
    std::vector<ParamBlock> blocks;
    for (auto& layer : layers)
        for (auto& block : layer.param_blocks()) blocks.push_back(block);
    return blocks;
}

double mse(const std::vector<double>& pred, const std::vector<double>& target,
           std::vector<double>* grad) {
    if (pred.size() != target.size()) throw DimensionError("mse size mismatch");
    if (pred.empty()) throw DimensionError("mse of empty vectors");
    const double n = static_cast<double>(pred.size());
    double total = 0.0;
    if (grad != nullptr) grad->resize(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double diff = pred[i] - target[i];
        total += diff * diff;
        if (grad != nullptr) (*grad)[i] = 2.0 * diff / n;
    }
    return total / n;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    std::vector<double> probs(logits.size());
    const double top = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - top);
        total += probs[i];
    }
    for (auto& p : probs) p /= total;
    return probs;
}

double softmax_cross_entropy(const std::vector<double>& logits, int target_index,
                             std::vector<double>* grad) {
    if (logits.empty()) throw DimensionError("cross entropy of empty logits");
    if (target_index < 0 || target_index >= static_cast<int>(logits.size()))
        throw DimensionError("cross entropy target index out of range");
    const std::vector<double> probs = softmax(logits);
    if (grad != nullptr) {
        *grad = probs;
        (*grad)[static_cast<std::size_t>(target_index)] -= 1.0;
    }
    return -std::log(std::max(probs[static_cast<std::size_t>(target_index)], 1e-300));
}

void Sgd::step(const std::vector<ParamBlock>& blocks) {
    for (const auto& block : blocks) {
        auto& values = *block.values;
        const auto& grads = *block.grads;
        for (std::size_t i = 0; i < values.size(); ++i) values[i] -= lr_ * grads[i];
    }
}

void Adam::step(const std::vector<ParamBlock>& blocks) {
    if (m_.empty()) {
        for (const auto& block : blocks) {
            m_.emplace_back(block.values->size(), 0.0);
            v_.emplace_back(block.values->size(), 0.0);
        }
    }
    if (m_.size() != blocks.size()) throw DimensionError("adam block list changed between steps");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        auto& values = *blocks[k].values;
        const auto& grads = *blocks[k].grads;
        if (values.size() != m_[k].size())
            throw DimensionError("adam block size changed between steps");
        for (std::size_t i = 0; i < values.size(); ++i) {
            m_[k][i] = beta1_ * m_[k][i] + (1.0 - beta1_) * grads[i];
            v_[k][i] = beta2_ * v_[k][i] + (1.0 - beta2_) * grads[i] * grads[i];
            const double mhat = m_[k][i] / bc1;
            const double vhat = v_[k][i] / bc2;
            values[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

}  // namespace tidp::nn

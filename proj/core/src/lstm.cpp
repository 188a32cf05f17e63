#include <cmath>
#include <cstring>

#include "tidp/errors.hpp"
#include "tidp/nn/layers.hpp"

namespace tidp::nn {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Lstm::Lstm(int n_input, int n_hidden) : input(n_input), hidden(n_hidden) {
    if (n_input < 1 || n_hidden < 1) throw DimensionError("lstm needs positive dimensions");
    w.assign(static_cast<std::size_t>(4 * hidden) * (input + hidden), 0.0);
    b.assign(static_cast<std::size_t>(4 * hidden), 0.0);
    gw.assign(w.size(), 0.0);
    gb.assign(b.size(), 0.0);
}

void Lstm::init(Rng& rng) {
    const double s = 1.0 / std::sqrt(static_cast<double>(input + hidden));
    for (auto& v : w) v = rng.uniform(-s, s);
    std::fill(b.begin(), b.end(), 0.0);
    // Forget-gate biases start at +1 so early training does not wipe the cell.
    for (int u = 0; u < hidden; ++u) b[static_cast<std::size_t>(hidden + u)] = 1.0;
}

std::vector<double> Lstm::forward(const Dense2D& x_seq, Trace* trace) const {
    if (static_cast<int>(x_seq.cols) != input) throw DimensionError("lstm input width mismatch");
    const int steps = static_cast<int>(x_seq.rows);
    const int z_size = input + hidden;
    const std::size_t H = static_cast<std::size_t>(hidden);

    std::vector<double> h(H, 0.0);
    std::vector<double> c(H, 0.0);
    std::vector<double> z(static_cast<std::size_t>(z_size));
    std::vector<double> gates(4 * H);
    std::vector<double> ctanh(H);

    if (trace != nullptr) {
        trace->steps = steps;
        trace->gates.assign(static_cast<std::size_t>(steps), {});
        trace->cell.assign(static_cast<std::size_t>(steps), {});
        trace->cell_tanh.assign(static_cast<std::size_t>(steps), {});
        trace->h.assign(static_cast<std::size_t>(steps), {});
    }

    for (int t = 0; t < steps; ++t) {
        const double* x = x_seq.row(static_cast<std::size_t>(t));
        std::memcpy(z.data(), x, sizeof(double) * static_cast<std::size_t>(input));
        std::memcpy(z.data() + input, h.data(), sizeof(double) * H);

        for (int g = 0; g < 4 * hidden; ++g) {
            const double* row = w.data() + static_cast<std::size_t>(g) * z_size;
            double acc = b[static_cast<std::size_t>(g)];
            for (int j = 0; j < z_size; ++j) acc += row[j] * z[static_cast<std::size_t>(j)];
            gates[static_cast<std::size_t>(g)] = acc;
        }
        for (std::size_t u = 0; u < H; ++u) {
            const double i_g = sigmoid(gates[u]);
            const double f_g = sigmoid(gates[H + u]);
            const double g_g = std::tanh(gates[2 * H + u]);
            const double o_g = sigmoid(gates[3 * H + u]);
            gates[u] = i_g;
            gates[H + u] = f_g;
            gates[2 * H + u] = g_g;
            gates[3 * H + u] = o_g;
            c[u] = f_g * c[u] + i_g * g_g;
            ctanh[u] = std::tanh(c[u]);
            h[u] = o_g * ctanh[u];
        }
        if (trace != nullptr) {
            trace->gates[static_cast<std::size_t>(t)] = gates;
            trace->cell[static_cast<std::size_t>(t)] = c;
            trace->cell_tanh[static_cast<std::size_t>(t)] = ctanh;
            trace->h[static_cast<std::size_t>(t)] = h;
        }
    }
    return h;
}

void Lstm::backward(const Dense2D& x_seq, const Trace& trace,
                    const std::vector<double>& grad_hT) {
    const int steps = trace.steps;
    if (steps == 0) return;
    if (static_cast<int>(grad_hT.size()) != hidden)
        throw DimensionError("lstm output gradient size mismatch");
    const int z_size = input + hidden;
    const std::size_t H = static_cast<std::size_t>(hidden);

    std::vector<double> dh = grad_hT;
    std::vector<double> dc(H, 0.0);
    std::vector<double> da(4 * H);
    std::vector<double> z(static_cast<std::size_t>(z_size));

    for (int t = steps - 1; t >= 0; --t) {
        const auto ti = static_cast<std::size_t>(t);
        const auto& gates = trace.gates[ti];
        const auto& ctanh = trace.cell_tanh[ti];
        const double* c_prev = t > 0 ? trace.cell[ti - 1].data() : nullptr;
        const double* h_prev = t > 0 ? trace.h[ti - 1].data() : nullptr;
        const double* x = x_seq.row(ti);

        std::memcpy(z.data(), x, sizeof(double) * static_cast<std::size_t>(input));
        if (h_prev != nullptr)
            std::memcpy(z.data() + input, h_prev, sizeof(double) * H);
        else
            std::fill(z.begin() + input, z.end(), 0.0);

        for (std::size_t u = 0; u < H; ++u) {
            const double i_g = gates[u];
            const double f_g = gates[H + u];
            const double g_g = gates[2 * H + u];
            const double o_g = gates[3 * H + u];
            const double dct = dc[u] + dh[u] * o_g * (1.0 - ctanh[u] * ctanh[u]);
            const double cp = c_prev != nullptr ? c_prev[u] : 0.0;
            da[u] = dct * g_g * i_g * (1.0 - i_g);
            da[H + u] = dct * cp * f_g * (1.0 - f_g);
            da[2 * H + u] = dct * i_g * (1.0 - g_g * g_g);
            da[3 * H + u] = dh[u] * ctanh[u] * o_g * (1.0 - o_g);
            dc[u] = dct * f_g;
        }

        std::fill(dh.begin(), dh.end(), 0.0);
        for (int g = 0; g < 4 * hidden; ++g) {
            const auto gi = static_cast<std::size_t>(g);
            const double d = da[gi];
            gb[gi] += d;
            double* grow = gw.data() + gi * static_cast<std::size_t>(z_size);
            const double* wrow = w.data() + gi * static_cast<std::size_t>(z_size);
            for (int j = 0; j < z_size; ++j) grow[static_cast<std::size_t>(j)] += d * z[static_cast<std::size_t>(j)];
            for (int j = 0; j < hidden; ++j)
                dh[static_cast<std::size_t>(j)] += d * wrow[input + j];
        }
    }
}

std::vector<ParamBlock> Lstm::param_blocks() { return {{&w, &gw}, {&b, &gb}}; }

}  // namespace tidp::nn

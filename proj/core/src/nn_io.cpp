#include "nn_json.hpp"

#include "tidp/errors.hpp"

namespace tidp::nn {

namespace {

std::vector<double> doubles_from_json(const nlohmann::json& j, std::size_t expected,
                                      const char* what) {
    if (!j.is_array() || j.size() != expected)
        throw SchemaError(std::string("model file: bad length for ") + what);
    return j.get<std::vector<double>>();
}

}  // namespace

nlohmann::json dense_to_json(const Dense& layer) {
    return {{"in", layer.in},
            {"out", layer.out},
            {"activation", to_string(layer.act)},
            {"w", layer.w},
            {"b", layer.b}};
}

Dense dense_from_json(const nlohmann::json& j) {
    Dense layer(j.at("in").get<int>(), j.at("out").get<int>(),
                activation_from_string(j.at("activation").get<std::string>()));
    layer.w = doubles_from_json(j.at("w"), layer.w.size(), "dense weights");
    layer.b = doubles_from_json(j.at("b"), layer.b.size(), "dense biases");
    return layer;
}

nlohmann::json mlp_to_json(const Mlp& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : net.layers) layers.push_back(dense_to_json(layer));
    return {{"layers", layers}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
    Mlp net;
    for (const auto& layer : j.at("layers")) net.layers.push_back(dense_from_json(layer));
    for (std::size_t l = 1; l < net.layers.size(); ++l)
        if (net.layers[l].in != net.layers[l - 1].out)
            throw SchemaError("model file: mlp layer sizes do not chain");
    return net;
}

nlohmann::json lstm_to_json(const Lstm& cell) {
    return {{"input", cell.input}, {"hidden", cell.hidden}, {"w", cell.w}, {"b", cell.b}};
}

Lstm lstm_from_json(const nlohmann::json& j) {
    Lstm cell(j.at("input").get<int>(), j.at("hidden").get<int>());
    cell.w = doubles_from_json(j.at("w"), cell.w.size(), "lstm weights");
    cell.b = doubles_from_json(j.at("b"), cell.b.size(), "lstm biases");
    return cell;
}

}  // namespace tidp::nn

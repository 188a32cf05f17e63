#include <fstream>
#include <memory>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "tidp/errors.hpp"
#include "tidp/regressors.hpp"

namespace tidp {

namespace {

using nlohmann::json;

json node_to_json(const TreeNode& node) {
    if (node.is_leaf()) return json{{"value", node.value}};
    return json{{"feature", node.feature},
                {"threshold", node.threshold},
                {"left", node_to_json(*node.left)},
                {"right", node_to_json(*node.right)}};
}

TreeNode node_from_json(const json& j) {
    TreeNode node;
    if (j.contains("value")) {
        node.value = j.at("value").get<double>();
        return node;
    }
    node.feature = j.at("feature").get<int>();
    node.threshold = j.at("threshold").get<double>();
    if (node.feature < 0) throw SchemaError("regressor file: split node with negative feature");
    node.left = std::make_unique<TreeNode>(node_from_json(j.at("left")));
    node.right = std::make_unique<TreeNode>(node_from_json(j.at("right")));
    return node;
}

json forest_to_json(const std::vector<TreeNode>& trees) {
    json arr = json::array();
    for (const auto& t : trees) arr.push_back(node_to_json(t));
    return arr;
}

std::vector<TreeNode> forest_from_json(const json& arr) {
    if (!arr.is_array() || arr.empty())
        throw SchemaError("regressor file: expected a non-empty tree array");
    std::vector<TreeNode> trees;
    trees.reserve(arr.size());
    for (const auto& j : arr) trees.push_back(node_from_json(j));
    return trees;
}

std::vector<double> doubles_from(const json& j, const char* what) {
    if (!j.is_array()) throw SchemaError(std::string("regressor file: ") + what + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
}

json matrix_to_json(const Dense2D& m) {
    return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Dense2D matrix_from_json(const json& j) {
    Dense2D m;
    m.rows = j.at("rows").get<int>();
    m.cols = j.at("cols").get<int>();
    m.data = doubles_from(j.at("data"), "matrix data");
    if (m.rows < 0 || m.cols < 0 ||
        m.data.size() != static_cast<std::size_t>(m.rows) * static_cast<std::size_t>(m.cols))
        throw SchemaError("regressor file: matrix shape does not match data length");
    return m;
}

json model_payload(const Regressor& model) {
    switch (model.kind()) {
        case ModelKind::dt: {
            const auto& m = static_cast<const DecisionTreeModel&>(model);
            return json{{"root", node_to_json(m.root)}};
        }
        case ModelKind::rf: {
            const auto& m = static_cast<const RandomForestModel&>(model);
            return json{{"trees", forest_to_json(m.trees)}};
        }
        case ModelKind::gbdt: {
            const auto& m = static_cast<const GbdtModel&>(model);
            return json{{"base", m.base},
                        {"learning_rate", m.learning_rate},
                        {"trees", forest_to_json(m.trees)}};
        }
        case ModelKind::xgb: {
            const auto& m = static_cast<const XgbModel&>(model);
            return json{{"base", m.base},
                        {"learning_rate", m.learning_rate},
                        {"trees", forest_to_json(m.trees)}};
        }
        case ModelKind::knn: {
            const auto& m = static_cast<const KnnModel&>(model);
            return json{{"k", m.k},
                        {"train", matrix_to_json(m.train_standardized)},
                        {"targets", m.targets},
                        {"means", m.means},
                        {"sds", m.sds}};
        }
        case ModelKind::ols: {
            const auto& m = static_cast<const OlsModel&>(model);
            return json{{"coefficients", m.coefficients}};
        }
        case ModelKind::svr: {
            const auto& m = static_cast<const SvrModel&>(model);
            return json{{"w", m.w}, {"b", m.b}, {"means", m.means}, {"sds", m.sds}};
        }
    }
    throw ConfigError("unknown model kind");
}

std::unique_ptr<Regressor> model_from_payload(ModelKind kind, const json& p) {
    switch (kind) {
        case ModelKind::dt: {
            auto m = std::make_unique<DecisionTreeModel>();
            m->root = node_from_json(p.at("root"));
            return m;
        }
        case ModelKind::rf: {
            auto m = std::make_unique<RandomForestModel>();
            m->trees = forest_from_json(p.at("trees"));
            return m;
        }
        case ModelKind::gbdt: {
            auto m = std::make_unique<GbdtModel>();
            m->base = p.at("base").get<double>();
            m->learning_rate = p.at("learning_rate").get<double>();
            m->trees = forest_from_json(p.at("trees"));
            return m;
        }
        case ModelKind::xgb: {
            auto m = std::make_unique<XgbModel>();
            m->base = p.at("base").get<double>();
            m->learning_rate = p.at("learning_rate").get<double>();
            m->trees = forest_from_json(p.at("trees"));
            return m;
        }
        case ModelKind::knn: {
            auto m = std::make_unique<KnnModel>();
            m->k = p.at("k").get<int>();
            m->train_standardized = matrix_from_json(p.at("train"));
            m->targets = doubles_from(p.at("targets"), "targets");
            m->means = doubles_from(p.at("means"), "means");
            m->sds = doubles_from(p.at("sds"), "sds");
            if (m->k < 1 || m->k > m->train_standardized.rows)
                throw SchemaError("regressor file: knn k out of range");
            if (m->targets.size() != static_cast<std::size_t>(m->train_standardized.rows) ||
                m->means.size() != static_cast<std::size_t>(m->train_standardized.cols) ||
                m->sds.size() != m->means.size())
                throw SchemaError("regressor file: knn payload shapes disagree");
            return m;
        }
        case ModelKind::ols: {
            auto m = std::make_unique<OlsModel>();
            m->coefficients = doubles_from(p.at("coefficients"), "coefficients");
            if (m->coefficients.empty())
                throw SchemaError("regressor file: ols payload has no coefficients");
            return m;
        }
        case ModelKind::svr: {
            auto m = std::make_unique<SvrModel>();
            m->w = doubles_from(p.at("w"), "w");
            m->b = p.at("b").get<double>();
            m->means = doubles_from(p.at("means"), "means");
            m->sds = doubles_from(p.at("sds"), "sds");
            if (m->means.size() != m->w.size() || m->sds.size() != m->w.size())
                throw SchemaError("regressor file: svr payload shapes disagree");
            return m;
        }
    }
    throw ConfigError("unknown model kind");
}

}  // namespace

void save_regressor(const Regressor& model, std::ostream& out) {
    json doc{{"format", "tidp-regressor"},
             {"version", 1},
             {"kind", to_string(model.kind())},
             {"feature_names", model.feature_names},
             {"model", model_payload(model)}};
    out << doc.dump(2) << '\n';
}

void save_regressor_file(const Regressor& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MissingArtifactError("cannot open for writing: " + path);
    save_regressor(model, out);
}

std::unique_ptr<Regressor> load_regressor(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("regressor file: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "tidp-regressor")
            throw SchemaError("regressor file: unexpected format tag");
        if (doc.at("version").get<int>() != 1)
            throw SchemaError("regressor file: unsupported version");
        const ModelKind kind = model_kind_from_string(doc.at("kind").get<std::string>());
        auto model = model_from_payload(kind, doc.at("model"));
        model->feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        return model;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("regressor file: ") + e.what());
    }
}

std::unique_ptr<Regressor> load_regressor_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("regressor file not found: " + path);
    return load_regressor(in);
}

}  // namespace tidp

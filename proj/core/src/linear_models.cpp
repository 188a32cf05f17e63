#include <algorithm>
#include <cmath>
#include <string>

#include "regressor_internal.hpp"
#include "tidp/errors.hpp"
#include "tidp/linalg.hpp"

namespace tidp {

void FeatureTable::validate() const {
    if (n_rows() != target.size())
        throw DimensionError("feature table: row count does not match target count");
    if (feature_names.size() != n_features())
        throw DimensionError("feature table: feature name count does not match column count");
    if (values.rows == 0) throw InsufficientDataError("feature table is empty");
    for (const double v : values.data)
        if (!std::isfinite(v)) throw NumericError("feature table contains a non-finite value");
    for (const double t : target) {
        if (!std::isfinite(t)) throw NumericError("feature table target contains a non-finite value");
        if (t <= 0.0) throw NumericError("feature table target must be positive minutes");
    }
}

ModelKind model_kind_from_string(std::string_view name) {
    if (name == "dt") return ModelKind::dt;
    if (name == "rf") return ModelKind::rf;
    if (name == "gbdt") return ModelKind::gbdt;
    if (name == "xgb") return ModelKind::xgb;
    if (name == "knn") return ModelKind::knn;
    if (name == "ols") return ModelKind::ols;
    if (name == "svr") return ModelKind::svr;
    throw ConfigError("unknown model kind: " + std::string(name));
}

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::dt: return "dt";
        case ModelKind::rf: return "rf";
        case ModelKind::gbdt: return "gbdt";
        case ModelKind::xgb: return "xgb";
        case ModelKind::knn: return "knn";
        case ModelKind::ols: return "ols";
        case ModelKind::svr: return "svr";
    }
    return "gbdt";
}

void RegressorConfig::validate() const {
    switch (kind) {
        case ModelKind::dt:
            if (max_depth < 1 || min_samples_leaf < 1)
                throw ConfigError("dt needs max_depth >= 1 and min_samples_leaf >= 1");
            break;
        case ModelKind::rf:
            if (n_trees < 1) throw ConfigError("rf needs n_trees >= 1");
            if (max_depth < 1 || min_samples_leaf < 1)
                throw ConfigError("rf needs max_depth >= 1 and min_samples_leaf >= 1");
            break;
        case ModelKind::gbdt:
        case ModelKind::xgb:
            if (n_trees < 1) throw ConfigError("boosting needs n_trees >= 1");
            if (learning_rate <= 0.0 || learning_rate > 1.0)
                throw ConfigError("boosting needs learning_rate in (0, 1]");
            if (max_depth < 1 || min_samples_leaf < 1)
                throw ConfigError("boosting needs max_depth >= 1 and min_samples_leaf >= 1");
            if (subsample <= 0.0 || subsample > 1.0)
                throw ConfigError("boosting needs subsample in (0, 1]");
            if (kind == ModelKind::xgb && lambda < 0.0)
                throw ConfigError("xgb needs lambda >= 0");
            break;
        case ModelKind::knn:
            if (k < 1) throw ConfigError("knn needs k >= 1");
            break;
        case ModelKind::ols:
            break;
        case ModelKind::svr:
            if (epsilon < 0.0) throw ConfigError("svr needs epsilon >= 0");
            if (svr_lr <= 0.0 || svr_epochs < 1 || svr_c <= 0.0)
                throw ConfigError("svr needs positive learning rate, epochs, and C");
            break;
    }
}

namespace detail {

double sorted_mean(std::vector<double> values) {
    if (values.empty()) throw InsufficientDataError("mean of an empty set");
    std::sort(values.begin(), values.end());
    double total = 0.0;
    for (const double v : values) total += v;
    return total / static_cast<double>(values.size());
}

void standardize_fit(const Dense2D& x, std::vector<double>& means, std::vector<double>& sds) {
    means.assign(static_cast<std::size_t>(x.cols), 0.0);
    sds.assign(static_cast<std::size_t>(x.cols), 0.0);
    std::vector<double> column(static_cast<std::size_t>(x.rows));
    for (int j = 0; j < x.cols; ++j) {
        for (int i = 0; i < x.rows; ++i) column[static_cast<std::size_t>(i)] = x.at(i, j);
        std::sort(column.begin(), column.end());
        double total = 0.0;
        for (const double v : column) total += v;
        const double mean = total / static_cast<double>(x.rows);
        double sq = 0.0;
        for (const double v : column) sq += (v - mean) * (v - mean);
        const double sd = std::sqrt(sq / static_cast<double>(x.rows));
        means[static_cast<std::size_t>(j)] = mean;
        sds[static_cast<std::size_t>(j)] = sd > 0.0 ? sd : 1.0;
    }
}

std::unique_ptr<Regressor> fit_knn(const FeatureTable& table, const RegressorConfig& config) {
    if (static_cast<std::size_t>(config.k) > table.n_rows())
        throw ConfigError("knn: k exceeds the number of training rows");
    auto model = std::make_unique<KnnModel>();
    model->k = config.k;
    standardize_fit(table.values, model->means, model->sds);
    const int n = table.values.rows;
    const int p = table.values.cols;
    model->train_standardized = Dense2D::zeros(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j)
            model->train_standardized.at(i, j) =
                (table.values.at(i, j) - model->means[static_cast<std::size_t>(j)]) /
                model->sds[static_cast<std::size_t>(j)];
    model->targets = table.target;
    return model;
}

std::unique_ptr<Regressor> fit_ols(const FeatureTable& table, const RegressorConfig&) {
    if (table.n_rows() <= table.n_features())
        throw InsufficientDataError("ols needs more rows than features");
    const int n = table.values.rows;
    const int p = table.values.cols;
    Dense2D design = Dense2D::zeros(n, p + 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) design.at(i, j) = table.values.at(i, j);
        design.at(i, p) = 1.0;
    }
    std::vector<std::string> names = table.feature_names;
    names.push_back("intercept");
    auto model = std::make_unique<OlsModel>();
    model->coefficients = linalg::solve_least_squares(design, table.target, &names);
    return model;
}

std::unique_ptr<Regressor> fit_svr(const FeatureTable& table, const RegressorConfig& config) {
    auto model = std::make_unique<SvrModel>();
    standardize_fit(table.values, model->means, model->sds);
    const int n = table.values.rows;
    const int p = table.values.cols;
    Dense2D xs = Dense2D::zeros(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j)
            xs.at(i, j) = (table.values.at(i, j) - model->means[static_cast<std::size_t>(j)]) /
                          model->sds[static_cast<std::size_t>(j)];

    model->w.assign(static_cast<std::size_t>(p), 0.0);
    model->b = sorted_mean(table.target);

    std::vector<double> grad_w(static_cast<std::size_t>(p));
    for (int epoch = 0; epoch < config.svr_epochs; ++epoch) {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        double grad_b = 0.0;
        for (int i = 0; i < n; ++i) {
            double f = model->b;
            for (int j = 0; j < p; ++j) f += model->w[static_cast<std::size_t>(j)] * xs.at(i, j);
            const double r = table.target[static_cast<std::size_t>(i)] - f;
            if (std::abs(r) <= config.epsilon) continue;
            const double sign = r > 0.0 ? -1.0 : 1.0;  // d|y - f| / df
            for (int j = 0; j < p; ++j)
                grad_w[static_cast<std::size_t>(j)] += config.svr_c * sign * xs.at(i, j);
            grad_b += config.svr_c * sign;
        }
        for (int j = 0; j < p; ++j) {
            auto& wj = model->w[static_cast<std::size_t>(j)];
            grad_w[static_cast<std::size_t>(j)] += wj;  // ridge term of the primal objective
            wj -= config.svr_lr * grad_w[static_cast<std::size_t>(j)];
        }
        model->b -= config.svr_lr * grad_b;
    }
    return model;
}

}  // namespace detail

double KnnModel::predict_row(const std::vector<double>& row) const {
    if (row.size() != means.size()) throw DimensionError("knn: query width mismatch");
    const int n = train_standardized.rows;
    const int p = train_standardized.cols;
    std::vector<std::pair<double, int>> distances;
    distances.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double d2 = 0.0;
        for (int j = 0; j < p; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            const double diff = (row[ju] - means[ju]) / sds[ju] - train_standardized.at(i, j);
            d2 += diff * diff;
        }
        distances.emplace_back(d2, i);
    }
    std::partial_sort(distances.begin(), distances.begin() + k, distances.end());
    double total = 0.0;
    for (int i = 0; i < k; ++i)
        total += targets[static_cast<std::size_t>(distances[static_cast<std::size_t>(i)].second)];
    return total / static_cast<double>(k);
}

double OlsModel::predict_row(const std::vector<double>& row) const {
    if (row.size() + 1 != coefficients.size()) throw DimensionError("ols: query width mismatch");
    double value = coefficients.back();
    for (std::size_t j = 0; j < row.size(); ++j) value += coefficients[j] * row[j];
    return value;
}

double SvrModel::predict_row(const std::vector<double>& row) const {
    if (row.size() != w.size()) throw DimensionError("svr: query width mismatch");
    double value = b;
    for (std::size_t j = 0; j < row.size(); ++j)
        value += w[j] * (row[j] - means[j]) / sds[j];
    return value;
}

std::unique_ptr<Regressor> fit_regressor(const FeatureTable& table,
                                         const RegressorConfig& config) {
    table.validate();
    config.validate();
    std::unique_ptr<Regressor> model;
    switch (config.kind) {
        case ModelKind::dt: model = detail::fit_dt(table, config); break;
        case ModelKind::rf: model = detail::fit_rf(table, config); break;
        case ModelKind::gbdt: model = detail::fit_gbdt(table, config); break;
        case ModelKind::xgb: model = detail::fit_xgb(table, config); break;
        case ModelKind::knn: model = detail::fit_knn(table, config); break;
        case ModelKind::ols: model = detail::fit_ols(table, config); break;
        case ModelKind::svr: model = detail::fit_svr(table, config); break;
    }
    model->feature_names = table.feature_names;
    return model;
}

}  // namespace tidp

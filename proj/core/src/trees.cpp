#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "regressor_internal.hpp"
#include "tidp/errors.hpp"

namespace tidp {

namespace {

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

bool improves(const SplitChoice& candidate, const SplitChoice& best) {
    if (candidate.gain != best.gain) return candidate.gain > best.gain;
    if (candidate.feature != best.feature) return candidate.feature < best.feature;
    return candidate.threshold < best.threshold;
}

// One feature's canonical scan for the variance-reduction criterion. Pairs
// are sorted by (x, y) so partial sums are identical for any input row order.
void scan_feature_sse(const Dense2D& x, const std::vector<double>& y,
                      const std::vector<int>& rows, int feature, int min_samples_leaf,
                      SplitChoice* best) {
    const std::size_t n = rows.size();
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(n);
    for (const int r : rows)
        pairs.emplace_back(x.at(static_cast<std::size_t>(r), static_cast<std::size_t>(feature)),
                           y[static_cast<std::size_t>(r)]);
    std::sort(pairs.begin(), pairs.end());

    double total_s = 0.0, total_q = 0.0;
    for (const auto& [xv, yv] : pairs) {
        total_s += yv;
        total_q += yv * yv;
    }
    const double nd = static_cast<double>(n);
    const double parent_sse = total_q - total_s * total_s / nd;

    double left_s = 0.0, left_q = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        left_s += pairs[i].second;
        left_q += pairs[i].second * pairs[i].second;
        if (pairs[i + 1].first == pairs[i].first) continue;
        const auto n_left = static_cast<double>(i + 1);
        const auto n_right = static_cast<double>(n - i - 1);
        if (i + 1 < static_cast<std::size_t>(min_samples_leaf) ||
            n - i - 1 < static_cast<std::size_t>(min_samples_leaf))
            continue;
        const double sse_left = left_q - left_s * left_s / n_left;
        const double right_s = total_s - left_s;
        const double right_q = total_q - left_q;
        const double sse_right = right_q - right_s * right_s / n_right;
        SplitChoice candidate;
        candidate.gain = parent_sse - sse_left - sse_right;
        candidate.feature = feature;
        // Midpoint of the adjacent values; when they are so close the midpoint
        // rounds onto the lower one, the upper value keeps the partition the
        // scan just scored (x < threshold sends the lower value left).
        candidate.threshold = (pairs[i].first + pairs[i + 1].first) / 2.0;
        if (candidate.threshold <= pairs[i].first) candidate.threshold = pairs[i + 1].first;
        if (best->feature < 0 || improves(candidate, *best)) *best = candidate;
    }
}

double node_mean(const std::vector<double>& y, const std::vector<int>& rows) {
    std::vector<double> values;
    values.reserve(rows.size());
    for (const int r : rows) values.push_back(y[static_cast<std::size_t>(r)]);
    return detail::sorted_mean(std::move(values));
}

std::vector<int> pick_features(int n_features, const TreeFitParams& params) {
    if (params.feature_subset_size <= 0 || params.feature_subset_size >= n_features ||
        params.rng == nullptr) {
        std::vector<int> all(static_cast<std::size_t>(n_features));
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    std::vector<int> all(static_cast<std::size_t>(n_features));
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < params.feature_subset_size; ++i) {
        const auto j = static_cast<std::size_t>(
            params.rng->uniform_int(i, static_cast<std::int64_t>(n_features) - 1));
        std::swap(all[static_cast<std::size_t>(i)], all[j]);
    }
    all.resize(static_cast<std::size_t>(params.feature_subset_size));
    std::sort(all.begin(), all.end());
    return all;
}

TreeNode build_sse_node(const Dense2D& x, const std::vector<double>& y, std::vector<int>& rows,
                        int depth, const TreeFitParams& params) {
    TreeNode node;
    node.value = node_mean(y, rows);
    if (rows.size() < 2 || rows.size() < 2 * static_cast<std::size_t>(params.min_samples_leaf) ||
        depth >= params.max_depth)
        return node;

    SplitChoice best;
    for (const int feature : pick_features(static_cast<int>(x.cols), params))
        scan_feature_sse(x, y, rows, feature, params.min_samples_leaf, &best);
    if (best.feature < 0 || best.gain <= 0.0) return node;

    std::vector<int> left_rows, right_rows;
    for (const int r : rows) {
        const double value =
            x.at(static_cast<std::size_t>(r), static_cast<std::size_t>(best.feature));
        (value < best.threshold ? left_rows : right_rows).push_back(r);
    }
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = std::make_unique<TreeNode>(build_sse_node(x, y, left_rows, depth + 1, params));
    node.right = std::make_unique<TreeNode>(build_sse_node(x, y, right_rows, depth + 1, params));
    return node;
}

// Second-order boosting criterion: hessian is the constant 2 per row under
// squared loss, so H terms are 2 * count.
struct XgbSplitParams {
    int max_depth = 5;
    int min_samples_leaf = 1;
    double lambda = 1.0;
};

TreeNode build_xgb_node(const Dense2D& x, const std::vector<double>& g, std::vector<int>& rows,
                        int depth, const XgbSplitParams& params) {
    const double nd = static_cast<double>(rows.size());
    std::vector<double> g_values;
    g_values.reserve(rows.size());
    for (const int r : rows) g_values.push_back(g[static_cast<std::size_t>(r)]);
    std::sort(g_values.begin(), g_values.end());
    double g_total = 0.0;
    for (const double gv : g_values) g_total += gv;
    const double h_total = 2.0 * nd;

    TreeNode node;
    node.value = -g_total / (h_total + params.lambda);
    if (rows.size() < 2 || rows.size() < 2 * static_cast<std::size_t>(params.min_samples_leaf) ||
        depth >= params.max_depth)
        return node;

    SplitChoice best;
    const std::size_t n = rows.size();
    for (int feature = 0; feature < static_cast<int>(x.cols); ++feature) {
        std::vector<std::pair<double, double>> pairs;
        pairs.reserve(n);
        for (const int r : rows)
            pairs.emplace_back(
                x.at(static_cast<std::size_t>(r), static_cast<std::size_t>(feature)),
                g[static_cast<std::size_t>(r)]);
        std::sort(pairs.begin(), pairs.end());
        double feature_g_total = 0.0;
        for (const auto& [xv, gv] : pairs) feature_g_total += gv;
        const double parent_score = feature_g_total * feature_g_total / (h_total + params.lambda);

        double g_left = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            g_left += pairs[i].second;
            if (pairs[i + 1].first == pairs[i].first) continue;
            const std::size_t n_left = i + 1;
            const std::size_t n_right = n - i - 1;
            if (n_left < static_cast<std::size_t>(params.min_samples_leaf) ||
                n_right < static_cast<std::size_t>(params.min_samples_leaf))
                continue;
            const double h_left = 2.0 * static_cast<double>(n_left);
            const double h_right = 2.0 * static_cast<double>(n_right);
            const double g_right = feature_g_total - g_left;
            SplitChoice candidate;
            candidate.gain = 0.5 * (g_left * g_left / (h_left + params.lambda) +
                                    g_right * g_right / (h_right + params.lambda) - parent_score);
            candidate.feature = feature;
            // Same midpoint guard as the SSE scan: never let rounding collapse
            // the threshold onto the lower value.
            candidate.threshold = (pairs[i].first + pairs[i + 1].first) / 2.0;
            if (candidate.threshold <= pairs[i].first) candidate.threshold = pairs[i + 1].first;
            if (best.feature < 0 || improves(candidate, best)) best = candidate;
        }
    }
    if (best.feature < 0 || best.gain <= 0.0) return node;

    std::vector<int> left_rows, right_rows;
    for (const int r : rows) {
        const double value =
            x.at(static_cast<std::size_t>(r), static_cast<std::size_t>(best.feature));
        (value < best.threshold ? left_rows : right_rows).push_back(r);
    }
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = std::make_unique<TreeNode>(build_xgb_node(x, g, left_rows, depth + 1, params));
    node.right = std::make_unique<TreeNode>(build_xgb_node(x, g, right_rows, depth + 1, params));
    return node;
}

std::vector<int> all_rows(std::size_t n) {
    std::vector<int> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

// Row subset copy for boosting subsampling; indices preserve original order.
Dense2D subset_matrix(const Dense2D& x, const std::vector<int>& rows) {
    Dense2D sub = Dense2D::zeros(static_cast<int>(rows.size()), x.cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < x.cols; ++j)
            sub.at(static_cast<int>(i), j) = x.at(rows[i], j);
    return sub;
}

std::vector<int> subsample_rows(std::size_t n, double fraction, Rng& rng) {
    const auto want =
        std::max<std::size_t>(1, static_cast<std::size_t>(fraction * static_cast<double>(n)));
    std::vector<int> rows = all_rows(n);
    for (std::size_t i = 0; i < want; ++i) {
        const auto j = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n) - 1));
        std::swap(rows[i], rows[j]);
    }
    rows.resize(want);
    std::sort(rows.begin(), rows.end());
    return rows;
}

}  // namespace

double predict_tree(const TreeNode& node, const double* row) {
    const TreeNode* current = &node;
    while (!current->is_leaf())
        current = row[current->feature] < current->threshold ? current->left.get()
                                                             : current->right.get();
    return current->value;
}

TreeNode fit_tree_raw(const Dense2D& x, const std::vector<double>& y,
                      const TreeFitParams& params) {
    if (x.rows == 0) throw InsufficientDataError("cannot fit a tree on an empty table");
    if (static_cast<std::size_t>(x.rows) != y.size())
        throw DimensionError("tree fit: row/target count mismatch");
    std::vector<int> rows = all_rows(x.rows);
    return build_sse_node(x, y, rows, 0, params);
}

std::vector<double> Regressor::predict(const Dense2D& rows) const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(rows.rows));
    std::vector<double> row(static_cast<std::size_t>(rows.cols));
    for (int r = 0; r < rows.rows; ++r) {
        for (int c = 0; c < rows.cols; ++c) row[static_cast<std::size_t>(c)] = rows.at(r, c);
        out.push_back(predict_row(row));
    }
    return out;
}

double DecisionTreeModel::predict_row(const std::vector<double>& row) const {
    return predict_tree(root, row.data());
}

double RandomForestModel::predict_row(const std::vector<double>& row) const {
    double total = 0.0;
    for (const auto& tree : trees) total += predict_tree(tree, row.data());
    return total / static_cast<double>(trees.size());
}

double GbdtModel::predict_row(const std::vector<double>& row) const {
    double value = base;
    for (const auto& tree : trees) value += learning_rate * predict_tree(tree, row.data());
    return value;
}

double XgbModel::predict_row(const std::vector<double>& row) const {
    double value = base;
    for (const auto& tree : trees) value += learning_rate * predict_tree(tree, row.data());
    return value;
}

GbdtModel fit_gbdt_raw(const Dense2D& x, const std::vector<double>& y,
                       const RegressorConfig& config) {
    if (x.rows == 0) throw InsufficientDataError("cannot fit gbdt on an empty table");
    if (static_cast<std::size_t>(x.rows) != y.size())
        throw DimensionError("gbdt fit: row/target count mismatch");
    GbdtModel model;
    model.learning_rate = config.learning_rate;
    model.base = detail::sorted_mean(y);

    const auto n = static_cast<std::size_t>(x.rows);
    std::vector<double> current(n, model.base);
    TreeFitParams tree_params;
    tree_params.max_depth = config.max_depth;
    tree_params.min_samples_leaf = config.min_samples_leaf;

    std::vector<double> residual(n);
    for (int stage = 0; stage < config.n_trees; ++stage) {
        for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - current[i];
        TreeNode tree;
        if (config.subsample < 1.0) {
            Rng stage_rng(derive_seed(config.seed, static_cast<std::uint64_t>(stage)));
            const std::vector<int> rows = subsample_rows(n, config.subsample, stage_rng);
            std::vector<double> sub_residual;
            sub_residual.reserve(rows.size());
            for (const int r : rows) sub_residual.push_back(residual[static_cast<std::size_t>(r)]);
            tree = fit_tree_raw(subset_matrix(x, rows), sub_residual, tree_params);
        } else {
            tree = fit_tree_raw(x, residual, tree_params);
        }
        for (std::size_t i = 0; i < n; ++i)
            current[i] += config.learning_rate * predict_tree(tree, x.row(static_cast<int>(i)));
        model.trees.push_back(std::move(tree));
    }
    return model;
}

XgbModel fit_xgb_raw(const Dense2D& x, const std::vector<double>& y,
                     const RegressorConfig& config) {
    if (x.rows == 0) throw InsufficientDataError("cannot fit xgb on an empty table");
    if (static_cast<std::size_t>(x.rows) != y.size())
        throw DimensionError("xgb fit: row/target count mismatch");
    XgbModel model;
    model.learning_rate = config.learning_rate;
    model.base = detail::sorted_mean(y);

    XgbSplitParams split_params;
    split_params.max_depth = config.max_depth;
    split_params.min_samples_leaf = config.min_samples_leaf;
    split_params.lambda = config.lambda;

    const auto n = static_cast<std::size_t>(x.rows);
    std::vector<double> current(n, model.base);
    std::vector<double> g(n);
    for (int stage = 0; stage < config.n_trees; ++stage) {
        for (std::size_t i = 0; i < n; ++i) g[i] = 2.0 * (current[i] - y[i]);
        std::vector<int> rows = all_rows(n);
        TreeNode tree = build_xgb_node(x, g, rows, 0, split_params);
        for (std::size_t i = 0; i < n; ++i)
            current[i] += config.learning_rate * predict_tree(tree, x.row(static_cast<int>(i)));
        model.trees.push_back(std::move(tree));
    }
    return model;
}

namespace detail {

std::unique_ptr<Regressor> fit_dt(const FeatureTable& table, const RegressorConfig& config) {
    auto model = std::make_unique<DecisionTreeModel>();
    TreeFitParams params;
    params.max_depth = config.max_depth;
    params.min_samples_leaf = config.min_samples_leaf;
    model->root = fit_tree_raw(table.values, table.target, params);
    return model;
}

std::unique_ptr<Regressor> fit_rf(const FeatureTable& table, const RegressorConfig& config) {
    auto model = std::make_unique<RandomForestModel>();
    const auto n = table.n_rows();
    const int subset_size =
        static_cast<int>(std::ceil(std::sqrt(static_cast<double>(table.n_features()))));
    for (int t = 0; t < config.n_trees; ++t) {
        Rng tree_rng(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
        std::vector<int> rows;
        if (config.rf_bootstrap) {
            rows.reserve(n);
            for (std::size_t i = 0; i < n; ++i)
                rows.push_back(static_cast<int>(
                    tree_rng.uniform_int(0, static_cast<std::int64_t>(n) - 1)));
            std::sort(rows.begin(), rows.end());
        } else {
            rows = all_rows(n);
        }
        std::vector<double> targets;
        targets.reserve(rows.size());
        for (const int r : rows) targets.push_back(table.target[static_cast<std::size_t>(r)]);

        TreeFitParams params;
        params.max_depth = config.max_depth;
        params.min_samples_leaf = config.min_samples_leaf;
        if (config.rf_feature_subsets) {
            params.rng = &tree_rng;
            params.feature_subset_size = subset_size;
        }
        model->trees.push_back(fit_tree_raw(subset_matrix(table.values, rows), targets, params));
    }
    return model;
}

std::unique_ptr<Regressor> fit_gbdt(const FeatureTable& table, const RegressorConfig& config) {
    return std::make_unique<GbdtModel>(fit_gbdt_raw(table.values, table.target, config));
}

std::unique_ptr<Regressor> fit_xgb(const FeatureTable& table, const RegressorConfig& config) {
    return std::make_unique<XgbModel>(fit_xgb_raw(table.values, table.target, config));
}

}  // namespace detail

}  // namespace tidp

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tidp/matrix.hpp"
#include "tidp/rng.hpp"

namespace tidp {

/// Fused feature matrix with the duration target. Targets are strictly
/// positive minutes; NaN anywhere is rejected.
struct FeatureTable {
    std::vector<std::string> feature_names;
    Dense2D values;              // n_rows x n_features
    std::vector<double> target;  // n_rows

    std::size_t n_rows() const { return values.rows; }
    std::size_t n_features() const { return values.cols; }
    void validate() const;
};

enum class ModelKind { dt, rf, gbdt, xgb, knn, ols, svr };
inline constexpr std::array<ModelKind, 7> kAllModelKinds = {
    ModelKind::dt,  ModelKind::rf,  ModelKind::gbdt, ModelKind::xgb,
    ModelKind::knn, ModelKind::ols, ModelKind::svr};

ModelKind model_kind_from_string(std::string_view name);
const char* to_string(ModelKind kind);

struct RegressorConfig {
    ModelKind kind = ModelKind::gbdt;
    int max_depth = 5;
    int min_samples_leaf = 1;
    int n_trees = 100;
    double learning_rate = 0.1;
    double subsample = 1.0;  // boosting row fraction per stage; 1.0 = all rows
    int k = 5;               // knn neighbours
    double lambda = 1.0;     // xgb L2 leaf penalty
    double epsilon = 0.1;    // svr tube half-width
    double svr_lr = 0.01;
    int svr_epochs = 200;
    double svr_c = 1.0;
    std::uint64_t seed = 1;
    // Test hooks: disable forest randomness to compare against a single tree.
    bool rf_bootstrap = true;
    bool rf_feature_subsets = true;

    void validate() const;
};

/// Binary regression tree. feature < 0 marks a leaf carrying `value`; rows
/// with row[feature] < threshold descend left.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    double value = 0.0;
    std::unique_ptr<TreeNode> left, right;

    bool is_leaf() const { return feature < 0; }
};

double predict_tree(const TreeNode& node, const double* row);

struct TreeFitParams {
    int max_depth = 5;
    int min_samples_leaf = 1;
    Rng* rng = nullptr;           // used only when feature_subset_size > 0
    int feature_subset_size = 0;  // 0 = consider every feature at every split
};

/// Greedy SSE-decrease tree on raw arrays (no FeatureTable validation, so
/// boosting residuals and 0/1 classifier targets are fine). Split thresholds
/// are midpoints of consecutive sorted unique values (the upper value when the
/// midpoint rounds onto the lower); leaves predict the mean.
TreeNode fit_tree_raw(const Dense2D& x, const std::vector<double>& y,
                      const TreeFitParams& params);

class Regressor {
public:
    Regressor() = default;
    Regressor(const Regressor&) = default;
    Regressor& operator=(const Regressor&) = default;
    Regressor(Regressor&&) noexcept = default;
    Regressor& operator=(Regressor&&) noexcept = default;
    virtual ~Regressor() = default;

    virtual ModelKind kind() const = 0;
    virtual double predict_row(const std::vector<double>& row) const = 0;
    std::vector<double> predict(const Dense2D& rows) const;

    std::vector<std::string> feature_names;  // column-order contract for callers
};

class DecisionTreeModel final : public Regressor {
public:
    TreeNode root;
    ModelKind kind() const override { return ModelKind::dt; }
    double predict_row(const std::vector<double>& row) const override;
};

class RandomForestModel final : public Regressor {
public:
    std::vector<TreeNode> trees;
    ModelKind kind() const override { return ModelKind::rf; }
    double predict_row(const std::vector<double>& row) const override;
};

class GbdtModel final : public Regressor {
public:
    double base = 0.0;
    double learning_rate = 0.1;
    std::vector<TreeNode> trees;
    ModelKind kind() const override { return ModelKind::gbdt; }
    double predict_row(const std::vector<double>& row) const override;
};

class XgbModel final : public Regressor {
public:
    double base = 0.0;
    double learning_rate = 0.1;
    std::vector<TreeNode> trees;
    ModelKind kind() const override { return ModelKind::xgb; }
    double predict_row(const std::vector<double>& row) const override;
};

class KnnModel final : public Regressor {
public:
    int k = 5;
    Dense2D train_standardized;
    std::vector<double> targets;
    std::vector<double> means, sds;
    ModelKind kind() const override { return ModelKind::knn; }
    double predict_row(const std::vector<double>& row) const override;
};

class OlsModel final : public Regressor {
public:
    std::vector<double> coefficients;  // one per feature, intercept last
    ModelKind kind() const override { return ModelKind::ols; }
    double predict_row(const std::vector<double>& row) const override;
};

class SvrModel final : public Regressor {
public:
    std::vector<double> w;  // on standardized features
    double b = 0.0;
    std::vector<double> means, sds;
    ModelKind kind() const override { return ModelKind::svr; }
    double predict_row(const std::vector<double>& row) const override;
};

/// Raw-array fits reused by the boosting internals, the one-vs-rest
/// classifiers, and oracle tests.
GbdtModel fit_gbdt_raw(const Dense2D& x, const std::vector<double>& y,
                       const RegressorConfig& config);
XgbModel fit_xgb_raw(const Dense2D& x, const std::vector<double>& y,
                     const RegressorConfig& config);

/// Validates the table, then dispatches on config.kind.
std::unique_ptr<Regressor> fit_regressor(const FeatureTable& table,
                                         const RegressorConfig& config);

void save_regressor(const Regressor& model, std::ostream& out);
void save_regressor_file(const Regressor& model, const std::string& path);
std::unique_ptr<Regressor> load_regressor(std::istream& in);
std::unique_ptr<Regressor> load_regressor_file(const std::string& path);

}  // namespace tidp

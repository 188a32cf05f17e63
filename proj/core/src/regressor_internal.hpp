#pragma once

// Internal fit entry points and canonical-arithmetic helpers shared by the
// regressor translation units; not installed.

#include <memory>
#include <vector>

#include "tidp/regressors.hpp"

namespace tidp::detail {

std::unique_ptr<Regressor> fit_dt(const FeatureTable& table, const RegressorConfig& config);
std::unique_ptr<Regressor> fit_rf(const FeatureTable& table, const RegressorConfig& config);
std::unique_ptr<Regressor> fit_gbdt(const FeatureTable& table, const RegressorConfig& config);
std::unique_ptr<Regressor> fit_xgb(const FeatureTable& table, const RegressorConfig& config);
std::unique_ptr<Regressor> fit_knn(const FeatureTable& table, const RegressorConfig& config);
std::unique_ptr<Regressor> fit_ols(const FeatureTable& table, const RegressorConfig& config);
std::unique_ptr<Regressor> fit_svr(const FeatureTable& table, const RegressorConfig& config);

/// Mean accumulated in ascending value order, so the result does not depend
/// on the caller's row order.
double sorted_mean(std::vector<double> values);

/// Column means and population standard deviations, both accumulated in
/// sorted order; zero deviations are replaced by 1 so constant columns map
/// to zero instead of dividing by zero.
void standardize_fit(const Dense2D& x, std::vector<double>& means, std::vector<double>& sds);

}  // namespace tidp::detail

#pragma once

#include <vector>

namespace tidp {

struct MetricSet {
    double mape = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    double smape = 0.0;
};

/// Mean absolute percentage error, in percent. Throws NumericError when any
/// actual value is zero.
double mape(const std::vector<double>& actual, const std::vector<double>& forecast);

/// Root mean squared error.
double rmse(const std::vector<double>& actual, const std::vector<double>& forecast);

/// Mean absolute error.
double mae(const std::vector<double>& actual, const std::vector<double>& forecast);

/// Symmetric MAPE, in percent: |A-F| over the pairwise mean magnitude.
/// Throws NumericError when a pair has |A| + |F| = 0.
double smape(const std::vector<double>& actual, const std::vector<double>& forecast);

MetricSet compute_metrics(const std::vector<double>& actual,
                          const std::vector<double>& forecast);

}  // namespace tidp

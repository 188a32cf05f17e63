#include "tidp/metrics.hpp"

#include <cmath>
#include <string>

#include "tidp/errors.hpp"

namespace tidp {

namespace {

void check_pair(const std::vector<double>& actual, const std::vector<double>& forecast) {
    if (actual.empty()) throw DimensionError("metrics: empty input");
    if (actual.size() != forecast.size())
        throw DimensionError("metrics: actual and forecast lengths differ");
}

}  // namespace

double mape(const std::vector<double>& actual, const std::vector<double>& forecast) {
    check_pair(actual, forecast);
    double total = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0)
            throw NumericError("mape: actual value at index " + std::to_string(i) + " is zero");
        total += std::abs(actual[i] - forecast[i]) / std::abs(actual[i]);
    }
    return 100.0 * total / static_cast<double>(actual.size());
}

double rmse(const std::vector<double>& actual, const std::vector<double>& forecast) {
    check_pair(actual, forecast);
    double total = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double d = actual[i] - forecast[i];
        total += d * d;
    }
    return std::sqrt(total / static_cast<double>(actual.size()));
}

double mae(const std::vector<double>& actual, const std::vector<double>& forecast) {
    check_pair(actual, forecast);
    double total = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) total += std::abs(actual[i] - forecast[i]);
    return total / static_cast<double>(actual.size());
}

double smape(const std::vector<double>& actual, const std::vector<double>& forecast) {
    check_pair(actual, forecast);
    double total = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double denom = (std::abs(actual[i]) + std::abs(forecast[i])) / 2.0;
        if (denom == 0.0)
            throw NumericError("smape: both values at index " + std::to_string(i) + " are zero");
        total += std::abs(actual[i] - forecast[i]) / denom;
    }
    return 100.0 * total / static_cast<double>(actual.size());
}

MetricSet compute_metrics(const std::vector<double>& actual,
                          const std::vector<double>& forecast) {
    return MetricSet{mape(actual, forecast), rmse(actual, forecast), mae(actual, forecast),
                     smape(actual, forecast)};
}

}  // namespace tidp

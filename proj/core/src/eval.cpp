#include "tidp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "tidp/csv.hpp"
#include "tidp/errors.hpp"

namespace tidp {

std::vector<std::size_t> FoldPlan::test_rows(int fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) rows.push_back(i);
    return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(int fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) rows.push_back(i);
    return rows;
}

FoldPlan make_folds(std::size_t n_rows, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("make_folds: k must be at least 2");
    if (n_rows < static_cast<std::size_t>(k))
        throw InsufficientDataError("make_folds: " + std::to_string(n_rows) +
                                    " rows cannot fill " + std::to_string(k) + " folds");
    std::vector<std::size_t> order(n_rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);

    FoldPlan plan;
    plan.n_rows = n_rows;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(n_rows, 0);
    for (std::size_t i = 0; i < n_rows; ++i)
        plan.assignments[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    return plan;
}

namespace {

FeatureTable subset_table(const FeatureTable& table, const std::vector<std::size_t>& rows) {
    FeatureTable out;
    out.feature_names = table.feature_names;
    out.values = Dense2D::zeros(static_cast<int>(rows.size()), table.values.cols);
    out.target.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<int>(rows[i]);
        for (int j = 0; j < table.values.cols; ++j)
            out.values.at(static_cast<int>(i), j) = table.values.at(r, j);
        out.target.push_back(table.target[rows[i]]);
    }
    return out;
}

[[noreturn]] void rethrow_with_fold(int fold) {
    const std::string prefix = "fold " + std::to_string(fold) + ": ";
    try {
        throw;
    } catch (const SchemaError& e) {
        throw SchemaError(prefix + e.what());
    } catch (const MissingArtifactError& e) {
        throw MissingArtifactError(prefix + e.what());
    } catch (const NumericError& e) {
        throw NumericError(prefix + e.what());
    } catch (const InsufficientDataError& e) {
        throw InsufficientDataError(prefix + e.what());
    } catch (const EncodingError& e) {
        throw EncodingError(prefix + e.what());
    } catch (const DimensionError& e) {
        throw DimensionError(prefix + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    }
}

MetricSet mean_of(const std::vector<MetricSet>& sets) {
    MetricSet mean;
    for (const auto& s : sets) {
        mean.mape += s.mape;
        mean.rmse += s.rmse;
        mean.mae += s.mae;
        mean.smape += s.smape;
    }
    const auto n = static_cast<double>(sets.size());
    mean.mape /= n;
    mean.rmse /= n;
    mean.mae /= n;
    mean.smape /= n;
    return mean;
}

}  // namespace

CvResult cross_validate(const FeatureTable& table, const RegressorConfig& config,
                        const FoldPlan& plan) {
    if (plan.n_rows != table.n_rows())
        throw DimensionError("cross_validate: fold plan covers " + std::to_string(plan.n_rows) +
                             " rows but the table has " + std::to_string(table.n_rows()));
    CvResult result;
    result.per_fold.reserve(static_cast<std::size_t>(plan.k));
    for (int fold = 0; fold < plan.k; ++fold) {
        try {
            const auto train = plan.train_rows(fold);
            const auto test = plan.test_rows(fold);
            RegressorConfig fold_config = config;
            fold_config.seed = config.seed ^ static_cast<std::uint64_t>(fold);
            const auto model = fit_regressor(subset_table(table, train), fold_config);

            std::vector<double> actual, forecast;
            actual.reserve(test.size());
            forecast.reserve(test.size());
            std::vector<double> row(table.n_features());
            for (const std::size_t r : test) {
                for (std::size_t j = 0; j < row.size(); ++j)
                    row[j] = table.values.at(static_cast<int>(r), static_cast<int>(j));
                actual.push_back(table.target[r]);
                forecast.push_back(model->predict_row(row));
            }
            result.per_fold.push_back(compute_metrics(actual, forecast));
        } catch (...) {
            rethrow_with_fold(fold);
        }
    }
    result.means = mean_of(result.per_fold);
    return result;
}

std::vector<RankedModel> rank_baseline_models(
    const FeatureTable& baseline, const std::map<ModelKind, RegressorConfig>& configs,
    const FoldPlan& plan) {
    std::vector<RankedModel> ranking;
    for (const ModelKind kind : kAllModelKinds) {
        const auto it = configs.find(kind);
        if (it == configs.end())
            throw ConfigError(std::string("rank_baseline_models: no config for ") +
                              to_string(kind));
        const CvResult cv = cross_validate(baseline, it->second, plan);
        ranking.push_back(RankedModel{kind, cv.means});
    }
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const RankedModel& a, const RankedModel& b) {
                         return a.metrics.mape < b.metrics.mape;
                     });
    return ranking;
}

void write_model_ranking_csv(std::ostream& out, const std::vector<RankedModel>& ranking) {
    csv::write_row(out, {"model", "mape", "rmse", "mae", "smape"});
    for (const auto& r : ranking)
        csv::write_row(out, {to_string(r.kind), csv::format_double(r.metrics.mape),
                             csv::format_double(r.metrics.rmse), csv::format_double(r.metrics.mae),
                             csv::format_double(r.metrics.smape)});
}

std::vector<std::size_t> pareto_front_indices(
    const std::vector<std::pair<double, double>>& points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].first != points[b].first) return points[a].first < points[b].first;
        if (points[a].second != points[b].second) return points[a].second < points[b].second;
        return a < b;
    });

    std::vector<std::size_t> front;
    double best_second = std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < order.size()) {
        // Group of equal first coordinates; only its minimal second
        // coordinate can survive, and duplicates of that minimum all do.
        std::size_t j = i;
        double group_min = std::numeric_limits<double>::infinity();
        while (j < order.size() && points[order[j]].first == points[order[i]].first) {
            group_min = std::min(group_min, points[order[j]].second);
            ++j;
        }
        if (group_min < best_second) {
            for (std::size_t t = i; t < j; ++t)
                if (points[order[t]].second == group_min) front.push_back(order[t]);
            best_second = group_min;
        }
        i = j;
    }
    return front;
}

std::vector<ScenarioOutcome> pareto_front(const std::vector<ScenarioOutcome>& outcomes) {
    std::vector<std::pair<double, double>> points;
    points.reserve(outcomes.size());
    for (const auto& o : outcomes) points.emplace_back(o.metrics.mape, o.metrics.rmse);
    std::vector<ScenarioOutcome> front;
    for (const std::size_t idx : pareto_front_indices(points)) front.push_back(outcomes[idx]);
    return front;
}

RandomVectorResult random_vector_experiment(int dims, double lo, double hi, int n_pairs,
                                            std::uint64_t seed) {
    if (dims < 1 || n_pairs < 1 || !(lo < hi))
        throw ConfigError("random_vector_experiment: dims and n_pairs must be positive, lo < hi");
    Rng rng(seed);
    RandomVectorResult result;
    result.points.reserve(static_cast<std::size_t>(n_pairs));
    std::vector<double> actual(static_cast<std::size_t>(dims));
    std::vector<double> predicted(static_cast<std::size_t>(dims));
    for (int p = 0; p < n_pairs; ++p) {
        for (auto& v : actual) v = rng.uniform(lo, hi);
        for (auto& v : predicted) v = rng.uniform(lo, hi);
        result.points.emplace_back(mape(actual, predicted), rmse(actual, predicted));
    }
    result.front = pareto_front_indices(result.points);

    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [x, y] : result.points) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= static_cast<double>(result.points.size());
    mean_y /= static_cast<double>(result.points.size());
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (const auto& [x, y] : result.points) {
        sxy += (x - mean_x) * (y - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
        syy += (y - mean_y) * (y - mean_y);
    }
    result.pearson = sxy / std::sqrt(sxx * syy);
    return result;
}

}  // namespace tidp

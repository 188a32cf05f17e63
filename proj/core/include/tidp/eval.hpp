#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tidp/encoders.hpp"
#include "tidp/feature_source.hpp"
#include "tidp/metrics.hpp"
#include "tidp/regressors.hpp"
#include "tidp/rng.hpp"

namespace tidp {

/// Assignment of every row to one of k folds. Fold sizes differ by at most
/// one; the assignment is a seeded shuffle followed by round-robin.
struct FoldPlan {
    std::size_t n_rows = 0;
    int k = 10;
    std::vector<int> assignments;  // row index -> fold index, 0..k-1
    std::uint64_t seed = 0;

    std::vector<std::size_t> test_rows(int fold) const;
    std::vector<std::size_t> train_rows(int fold) const;
};

/// Throws InsufficientDataError when n_rows < k.
FoldPlan make_folds(std::size_t n_rows, int k, std::uint64_t seed);

struct CvResult {
    std::vector<MetricSet> per_fold;
    MetricSet means;  // arithmetic mean of the per-fold sets
};

/// Trains on the rows outside each fold and scores the rows inside it. Model
/// randomness is reseeded per fold as config.seed xor fold index. Fit errors
/// are rethrown with the fold index prefixed to the message.
CvResult cross_validate(const FeatureTable& table, const RegressorConfig& config,
                        const FoldPlan& plan);

struct RankedModel {
    ModelKind kind = ModelKind::gbdt;
    MetricSet metrics;  // 10-fold means on the baseline table
};

/// Cross-validates every configured model kind on the baseline-only table and
/// orders the results by MAPE ascending. The first three are the grid's
/// default model set.
std::vector<RankedModel> rank_baseline_models(
    const FeatureTable& baseline, const std::map<ModelKind, RegressorConfig>& configs,
    const FoldPlan& plan);

void write_model_ranking_csv(std::ostream& out, const std::vector<RankedModel>& ranking);

/// One cell of the scenario grid: which encoded feature joins the baseline,
/// and which model evaluates the fusion.
struct ScenarioSpec {
    ModelKind model = ModelKind::gbdt;
    FeatureSource source = FeatureSource::speed;
    int units = 8;
    nn::Activation activation = nn::Activation::relu;
    std::uint64_t seed = 0;  // per-cell seed derived from the master seed
};

struct ScenarioOutcome {
    ScenarioSpec spec;
    bool baseline_only = false;  // the per-model reference row
    MetricSet metrics;
    std::vector<MetricSet> per_fold;
};

/// Lookup of encoded vectors keyed by incident, source, units, activation.
class EncodedStore {
public:
    void add(EncodedVector v);

    /// Null when the store holds no entry for the key.
    const std::vector<double>* find(const std::string& incident_id, FeatureSource source,
                                    int units, nn::Activation activation) const;

    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, std::vector<double>> entries_;
};

EncodedStore load_encoded_store(const std::string& path);

struct GridSets {
    std::vector<FeatureSource> sources;
    std::vector<int> units;
    std::vector<nn::Activation> activations;
};

/// The full 7 x 5 x 4 default.
GridSets default_grid_sets();

struct GridRequest {
    const FeatureTable* baseline = nullptr;
    const std::vector<std::string>* incident_ids = nullptr;  // one per baseline row
    const EncodedStore* store = nullptr;
    std::vector<ModelKind> models;  // typically the top three from ranking
    GridSets sets = default_grid_sets();
    std::map<ModelKind, RegressorConfig> model_configs;
    std::uint64_t master_seed = 1;
    int n_folds = 10;
    int jobs = 1;
};

struct GridCellError {
    ScenarioSpec spec;
    std::string message;
};

struct GridResult {
    /// Baseline row per model first, then scenario outcomes in enumeration
    /// order (model-major, then source, units, activation).
    std::vector<ScenarioOutcome> outcomes;
    std::vector<GridCellError> errors;
};

/// Evaluates every (model, source, units, activation) cell plus one
/// baseline-only row per model. Cells with missing encoded vectors land in
/// `errors`; the rest of the grid still runs. One fold plan is shared by all
/// cells of a model, so scenario comparisons are paired.
GridResult run_grid(const GridRequest& request);

/// Indices of the points no other point dominates (both coordinates <= and
/// at least one strictly <). Result is ordered by the first coordinate
/// ascending, input order breaking ties.
std::vector<std::size_t> pareto_front_indices(
    const std::vector<std::pair<double, double>>& points);

std::vector<ScenarioOutcome> pareto_front(const std::vector<ScenarioOutcome>& outcomes);

struct RandomVectorResult {
    std::vector<std::pair<double, double>> points;  // (mape, rmse) per evaluation
    std::vector<std::size_t> front;                 // indices into points
    double pearson = 0.0;                           // correlation of mape vs rmse
};

/// Draws two uniform vectors per evaluation and scores one against the other.
RandomVectorResult random_vector_experiment(int dims, double lo, double hi, int n_pairs,
                                            std::uint64_t seed);

/// `model,source,units,activation,mape,rmse,mae,smape,fold1_mape..fold10_mape`;
/// baseline rows leave source, units, and activation empty.
void write_outcomes_csv(std::ostream& out, const std::vector<ScenarioOutcome>& outcomes);
std::vector<ScenarioOutcome> read_outcomes_csv(std::istream& in);

/// Text table of the model's baseline row followed by its eight best
/// scenarios by MAPE: AdditionData | units | activation | MAPE | RMSE.
void write_top8_report(std::ostream& out, ModelKind model,
                       const std::vector<ScenarioOutcome>& outcomes);

void write_pareto_csv(std::ostream& out, const std::vector<ScenarioOutcome>& front);

/// `mape,rmse,on_front` rows for every evaluation of the random-vector
/// experiment.
void write_scatter_csv(std::ostream& out, const RandomVectorResult& result);

/// `source,units,activation,band` where band is the quartile (q1 best) of the
/// scenario's MAPE within its model's grid.
void write_parallel_categories_csv(std::ostream& out,
                                   const std::vector<ScenarioOutcome>& outcomes);

}  // namespace tidp

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "tidp/errors.hpp"
#include "tidp/eval.hpp"
#include "tidp/rng.hpp"

using namespace tidp;

namespace {

FeatureTable linear_table(Rng& rng, int rows, int cols) {
    FeatureTable table;
    table.values = Dense2D::zeros(rows, cols);
    for (int j = 0; j < cols; ++j) table.feature_names.push_back("f" + std::to_string(j));
    for (int i = 0; i < rows; ++i) {
        double y = 20.0;
        for (int j = 0; j < cols; ++j) {
            const double v = rng.uniform(0.0, 10.0);
            table.values.at(i, j) = v;
            y += v * (j + 1);
        }
        table.target.push_back(y + rng.normal(0.0, 0.5));
    }
    return table;
}

std::map<ModelKind, RegressorConfig> fast_configs(std::uint64_t seed) {
    std::map<ModelKind, RegressorConfig> configs;
    for (const ModelKind kind : kAllModelKinds) {
        RegressorConfig c;
        c.kind = kind;
        c.n_trees = 8;
        c.max_depth = 3;
        c.k = 3;
        c.svr_epochs = 40;
        c.seed = seed;
        configs[kind] = c;
    }
    return configs;
}

}  // namespace

TEST_CASE("folds: 13 rows over 10 folds gives sizes {2,2,2,1...}") {
    const FoldPlan plan = make_folds(13, 10, 7);
    std::vector<int> sizes(10, 0);
    for (const int f : plan.assignments) sizes[static_cast<std::size_t>(f)]++;
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    CHECK(sizes == std::vector<int>{2, 2, 2, 1, 1, 1, 1, 1, 1, 1});
}

TEST_CASE("folds: n=10, k=10 puts one row per fold") {
    const FoldPlan plan = make_folds(10, 10, 3);
    std::set<int> folds(plan.assignments.begin(), plan.assignments.end());
    CHECK(folds.size() == 10);
}

TEST_CASE("folds: partition property and determinism") {
    const FoldPlan a = make_folds(57, 10, 11);
    const FoldPlan b = make_folds(57, 10, 11);
    CHECK(a.assignments == b.assignments);
    const FoldPlan c = make_folds(57, 10, 12);
    CHECK(a.assignments != c.assignments);

    std::set<std::size_t> seen;
    for (int f = 0; f < 10; ++f) {
        for (const std::size_t r : a.test_rows(f)) {
            CHECK(seen.insert(r).second);  // disjoint
        }
        const auto train = a.train_rows(f);
        CHECK(train.size() + a.test_rows(f).size() == 57);
    }
    CHECK(seen.size() == 57);  // complete
}

TEST_CASE("folds: fewer rows than folds is an error") {
    CHECK_THROWS_AS(make_folds(9, 10, 1), InsufficientDataError);
    CHECK_THROWS_AS(make_folds(5, 1, 1), ConfigError);
}

TEST_CASE("cross_validate: constant target scores zero error") {
    FeatureTable table;
    table.feature_names = {"x"};
    table.values = Dense2D::zeros(30, 1);
    for (int i = 0; i < 30; ++i) {
        table.values.at(i, 0) = i;
        table.target.push_back(42.0);
    }
    RegressorConfig config;
    config.kind = ModelKind::dt;
    const FoldPlan plan = make_folds(30, 10, 5);
    const CvResult cv = cross_validate(table, config, plan);
    CHECK(cv.means.mape == doctest::Approx(0.0));
    CHECK(cv.means.rmse == doctest::Approx(0.0));
}

TEST_CASE("cross_validate: means reconcile with per-fold metrics") {
    Rng rng(31);
    const auto table = linear_table(rng, 45, 3);
    RegressorConfig config;
    config.kind = ModelKind::gbdt;
    config.n_trees = 10;
    config.max_depth = 2;
    const FoldPlan plan = make_folds(45, 10, 9);
    const CvResult cv = cross_validate(table, config, plan);
    REQUIRE(cv.per_fold.size() == 10);
    double mape_sum = 0.0, rmse_sum = 0.0, mae_sum = 0.0, smape_sum = 0.0;
    for (const auto& m : cv.per_fold) {
        mape_sum += m.mape;
        rmse_sum += m.rmse;
        mae_sum += m.mae;
        smape_sum += m.smape;
    }
    CHECK(cv.means.mape == doctest::Approx(mape_sum / 10.0).epsilon(1e-9));
    CHECK(cv.means.rmse == doctest::Approx(rmse_sum / 10.0).epsilon(1e-9));
    CHECK(cv.means.mae == doctest::Approx(mae_sum / 10.0).epsilon(1e-9));
    CHECK(cv.means.smape == doctest::Approx(smape_sum / 10.0).epsilon(1e-9));
}

TEST_CASE("cross_validate: fit errors carry the fold index") {
    // Duplicate column makes OLS singular in every fold.
    FeatureTable table;
    table.feature_names = {"a", "a_copy"};
    table.values = Dense2D::zeros(20, 2);
    for (int i = 0; i < 20; ++i) {
        table.values.at(i, 0) = i;
        table.values.at(i, 1) = i;
        table.target.push_back(i + 1.0);
    }
    RegressorConfig config;
    config.kind = ModelKind::ols;
    const FoldPlan plan = make_folds(20, 10, 2);
    try {
        cross_validate(table, config, plan);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("fold 0") != std::string::npos);
    }
}

TEST_CASE("rank_baseline_models: ordered by mape, covers all kinds") {
    Rng rng(77);
    const auto table = linear_table(rng, 60, 3);
    const FoldPlan plan = make_folds(60, 10, 4);
    const auto ranking = rank_baseline_models(table, fast_configs(3), plan);
    REQUIRE(ranking.size() == kAllModelKinds.size());
    std::set<ModelKind> kinds;
    for (const auto& r : ranking) kinds.insert(r.kind);
    CHECK(kinds.size() == kAllModelKinds.size());
    for (std::size_t i = 1; i < ranking.size(); ++i)
        CHECK(ranking[i - 1].metrics.mape <= ranking[i].metrics.mape);

    std::ostringstream out;
    write_model_ranking_csv(out, ranking);
    CHECK(out.str().find("model,mape,rmse,mae,smape") == 0);
}

TEST_CASE("pareto: fixture front") {
    // (40,60) and (45,55) are mutually non-dominating; (50,70) is dominated.
    const std::vector<std::pair<double, double>> points{{40, 60}, {45, 55}, {50, 70}};
    const auto front = pareto_front_indices(points);
    CHECK(front == std::vector<std::size_t>{0, 1});
}

TEST_CASE("pareto: single point is its own front") {
    CHECK(pareto_front_indices({{1.0, 2.0}}) == std::vector<std::size_t>{0});
}

TEST_CASE("pareto: duplicates of the best point all survive") {
    const std::vector<std::pair<double, double>> points{{3, 3}, {3, 3}, {4, 2}, {2, 4}, {5, 5}};
    const auto front = pareto_front_indices(points);
    CHECK(front == std::vector<std::size_t>{3, 0, 1, 2});
}

TEST_CASE("pareto: membership is mutual non-domination") {
    Rng rng(19);
    std::vector<std::pair<double, double>> points;
    for (int i = 0; i < 200; ++i)
        points.emplace_back(rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0));
    const auto front = pareto_front_indices(points);
    REQUIRE_FALSE(front.empty());
    const auto dominates = [](const std::pair<double, double>& a,
                              const std::pair<double, double>& b) {
        return a.first <= b.first && a.second <= b.second &&
               (a.first < b.first || a.second < b.second);
    };
    // No member dominated by any point.
    for (const std::size_t f : front)
        for (std::size_t i = 0; i < points.size(); ++i)
            CHECK_FALSE(dominates(points[i], points[f]));
    // Every non-member dominated by some member.
    std::set<std::size_t> members(front.begin(), front.end());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (members.count(i)) continue;
        bool dominated = false;
        for (const std::size_t f : front) dominated |= dominates(points[f], points[i]);
        CHECK(dominated);
    }
    // Ordered by first coordinate.
    for (std::size_t i = 1; i < front.size(); ++i)
        CHECK(points[front[i - 1]].first <= points[front[i]].first);
}

TEST_CASE("random_vector_experiment: deterministic, correlated but imperfect") {
    const RandomVectorResult a = random_vector_experiment(100, 1.0, 10.0, 2000, 5);
    const RandomVectorResult b = random_vector_experiment(100, 1.0, 10.0, 2000, 5);
    CHECK(a.points == b.points);
    CHECK(a.pearson == b.pearson);
    CHECK(a.points.size() == 2000);
    CHECK(a.front.size() > 1);
    CHECK(a.pearson > 0.2);
    CHECK(a.pearson < 0.999);
    for (const auto& [m, r] : a.points) {
        CHECK(m > 0.0);
        CHECK(r > 0.0);
    }
    CHECK_THROWS_AS(random_vector_experiment(0, 1.0, 10.0, 10, 1), ConfigError);
    CHECK_THROWS_AS(random_vector_experiment(10, 5.0, 1.0, 10, 1), ConfigError);
}

TEST_CASE("encoded store: keyed lookup") {
    EncodedStore store;
    EncodedVector v;
    v.incident_id = "i7";
    v.source = FeatureSource::flow;
    v.units = 4;
    v.activation = nn::Activation::tanh;
    v.values = {0.1, 0.2, 0.3, 0.4};
    store.add(v);
    const auto* hit = store.find("i7", FeatureSource::flow, 4, nn::Activation::tanh);
    REQUIRE(hit != nullptr);
    CHECK(*hit == v.values);
    CHECK(store.find("i7", FeatureSource::flow, 8, nn::Activation::tanh) == nullptr);
    CHECK(store.find("i8", FeatureSource::flow, 4, nn::Activation::tanh) == nullptr);
    CHECK(store.size() == 1);
}

namespace {

/// Fully populated store for a toy grid: values depend deterministically on
/// the key so fused tables differ per scenario.
EncodedStore toy_store(const std::vector<std::string>& ids, const GridSets& sets) {
    EncodedStore store;
    for (const auto& id : ids) {
        for (const FeatureSource source : sets.sources) {
            for (const int units : sets.units) {
                for (const nn::Activation act : sets.activations) {
                    EncodedVector v;
                    v.incident_id = id;
                    v.source = source;
                    v.units = units;
                    v.activation = act;
                    Rng rng(derive_seed(std::hash<std::string>{}(id),
                                        static_cast<std::uint64_t>(units) * 100 +
                                            static_cast<std::uint64_t>(source) * 10 +
                                            static_cast<std::uint64_t>(act)));
                    for (int u = 0; u < units; ++u) v.values.push_back(rng.uniform());
                    store.add(v);
                }
            }
        }
    }
    return store;
}

}  // namespace

TEST_CASE("run_grid: full grid yields 140 scenarios per model plus baseline") {
    Rng rng(101);
    const int n = 24;
    const auto table = linear_table(rng, n, 2);
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("inc" + std::to_string(i));
    const GridSets sets = default_grid_sets();
    REQUIRE(sets.sources.size() == 7);
    REQUIRE(sets.units.size() == 5);
    REQUIRE(sets.activations.size() == 4);
    const EncodedStore store = toy_store(ids, sets);

    GridRequest request;
    request.baseline = &table;
    request.incident_ids = &ids;
    request.store = &store;
    request.models = {ModelKind::dt};
    request.sets = sets;
    auto configs = fast_configs(2);
    configs[ModelKind::dt].max_depth = 2;
    request.model_configs = configs;
    request.master_seed = 6;
    request.jobs = 4;

    const GridResult result = run_grid(request);
    CHECK(result.errors.empty());
    REQUIRE(result.outcomes.size() == 141);
    CHECK(result.outcomes[0].baseline_only);

    // Exactly one outcome per (source, units, activation) triple.
    std::set<std::string> keys;
    for (std::size_t i = 1; i < result.outcomes.size(); ++i) {
        const auto& o = result.outcomes[i];
        CHECK_FALSE(o.baseline_only);
        keys.insert(std::string(to_string(o.spec.source)) + "/" +
                    std::to_string(o.spec.units) + "/" + to_string(o.spec.activation));
        REQUIRE(o.per_fold.size() == 10);
        double sum = 0.0;
        for (const auto& m : o.per_fold) sum += m.mape;
        CHECK(o.metrics.mape == doctest::Approx(sum / 10.0).epsilon(1e-9));
    }
    CHECK(keys.size() == 140);
}

TEST_CASE("run_grid: jobs count does not change results") {
    Rng rng(102);
    const int n = 20;
    const auto table = linear_table(rng, n, 2);
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("x" + std::to_string(i));
    GridSets sets;
    sets.sources = {FeatureSource::speed, FeatureSource::lstm_sent};
    sets.units = {2, 4};
    sets.activations = {nn::Activation::relu, nn::Activation::tanh};
    const EncodedStore store = toy_store(ids, sets);

    GridRequest request;
    request.baseline = &table;
    request.incident_ids = &ids;
    request.store = &store;
    request.models = {ModelKind::dt, ModelKind::gbdt};
    request.sets = sets;
    request.model_configs = fast_configs(4);
    request.master_seed = 9;

    request.jobs = 1;
    const GridResult serial = run_grid(request);
    request.jobs = 8;
    const GridResult parallel = run_grid(request);
    REQUIRE(serial.outcomes.size() == parallel.outcomes.size());
    for (std::size_t i = 0; i < serial.outcomes.size(); ++i) {
        CHECK(serial.outcomes[i].metrics.mape == parallel.outcomes[i].metrics.mape);
        CHECK(serial.outcomes[i].metrics.rmse == parallel.outcomes[i].metrics.rmse);
        CHECK(serial.outcomes[i].spec.seed == parallel.outcomes[i].spec.seed);
    }
}

TEST_CASE("run_grid: missing encoded vector is a recorded error, not a crash") {
    Rng rng(103);
    const int n = 15;
    const auto table = linear_table(rng, n, 2);
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("y" + std::to_string(i));
    GridSets sets;
    sets.sources = {FeatureSource::speed};
    sets.units = {2};
    sets.activations = {nn::Activation::relu, nn::Activation::tanh};
    EncodedStore store;
    for (const auto& id : ids) {
        EncodedVector v;
        v.incident_id = id;
        v.source = FeatureSource::speed;
        v.units = 2;
        v.activation = nn::Activation::relu;  // tanh entries missing
        v.values = {0.5, 0.5};
        store.add(v);
    }

    GridRequest request;
    request.baseline = &table;
    request.incident_ids = &ids;
    request.store = &store;
    request.models = {ModelKind::dt};
    request.sets = sets;
    request.model_configs = fast_configs(1);

    const GridResult result = run_grid(request);
    CHECK(result.outcomes.size() == 2);  // baseline + relu cell
    REQUIRE(result.errors.size() == 1);
    CHECK(result.errors[0].spec.activation == nn::Activation::tanh);
    CHECK(result.errors[0].message.find("encoded") != std::string::npos);
}

TEST_CASE("outcomes csv: round-trip with baseline rows") {
    Rng rng(104);
    const int n = 15;
    const auto table = linear_table(rng, n, 2);
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("z" + std::to_string(i));
    GridSets sets;
    sets.sources = {FeatureSource::fd};
    sets.units = {2, 8};
    sets.activations = {nn::Activation::sigmoid};
    const EncodedStore store = toy_store(ids, sets);

    GridRequest request;
    request.baseline = &table;
    request.incident_ids = &ids;
    request.store = &store;
    request.models = {ModelKind::knn};
    request.sets = sets;
    request.model_configs = fast_configs(8);

    const GridResult result = run_grid(request);
    std::ostringstream out;
    write_outcomes_csv(out, result.outcomes);
    std::istringstream in(out.str());
    const auto back = read_outcomes_csv(in);
    REQUIRE(back.size() == result.outcomes.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].baseline_only == result.outcomes[i].baseline_only);
        CHECK(back[i].spec.model == result.outcomes[i].spec.model);
        CHECK(back[i].metrics.mape == result.outcomes[i].metrics.mape);
        CHECK(back[i].metrics.smape == result.outcomes[i].metrics.smape);
        REQUIRE(back[i].per_fold.size() == result.outcomes[i].per_fold.size());
        for (std::size_t f = 0; f < back[i].per_fold.size(); ++f)
            CHECK(back[i].per_fold[f].mape == result.outcomes[i].per_fold[f].mape);
        if (!back[i].baseline_only) {
            CHECK(back[i].spec.source == result.outcomes[i].spec.source);
            CHECK(back[i].spec.units == result.outcomes[i].spec.units);
            CHECK(back[i].spec.activation == result.outcomes[i].spec.activation);
        }
    }
}

TEST_CASE("top8 report: baseline row first, then best scenarios") {
    std::vector<ScenarioOutcome> outcomes;
    ScenarioOutcome baseline;
    baseline.spec.model = ModelKind::gbdt;
    baseline.baseline_only = true;
    baseline.metrics = {30.0, 12.0, 9.0, 25.0};
    outcomes.push_back(baseline);
    for (int i = 0; i < 12; ++i) {
        ScenarioOutcome o;
        o.spec.model = ModelKind::gbdt;
        o.spec.source = FeatureSource::speed;
        o.spec.units = kUnitGrid[static_cast<std::size_t>(i % 5)];
        o.spec.activation = kActivationGrid[static_cast<std::size_t>(i % 4)];
        o.metrics = {20.0 + i, 10.0 + i, 8.0, 20.0};
        outcomes.push_back(o);
    }
    std::ostringstream out;
    write_top8_report(out, ModelKind::gbdt, outcomes);
    const std::string report = out.str();
    // Header, separator, baseline row, eight scenario rows.
    CHECK(report.find("AdditionData") != std::string::npos);
    CHECK(report.find("MAPE") != std::string::npos);
    CHECK(std::count(report.begin(), report.end(), '\n') >= 11);
    // Best scenario (mape 20) appears; worst (mape 31) does not.
    CHECK(report.find("20.00") != std::string::npos);
    CHECK(report.find("31.00") == std::string::npos);
}

TEST_CASE("parallel categories: quartile bands per model") {
    std::vector<ScenarioOutcome> outcomes;
    for (int i = 0; i < 8; ++i) {
        ScenarioOutcome o;
        o.spec.model = ModelKind::dt;
        o.spec.source = i % 2 == 0 ? FeatureSource::speed : FeatureSource::flow;
        o.spec.units = 2;
        o.spec.activation = nn::Activation::relu;
        o.metrics.mape = 10.0 + i;
        outcomes.push_back(o);
    }
    std::ostringstream out;
    write_parallel_categories_csv(out, outcomes);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "source,units,activation,band");
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    REQUIRE(lines.size() == 8);
    // MAPE ascends with index here, so bands are q1,q1,q2,q2,q3,q3,q4,q4.
    CHECK(lines[0].find("q1") != std::string::npos);
    CHECK(lines[7].find("q4") != std::string::npos);
}

TEST_CASE("scatter csv: flags front membership") {
    const RandomVectorResult result = random_vector_experiment(10, 1.0, 10.0, 50, 3);
    std::ostringstream out;
    write_scatter_csv(out, result);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "mape,rmse,on_front");
    std::size_t rows = 0, on_front = 0;
    for (std::string line; std::getline(in, line);) {
        ++rows;
        if (line.size() >= 2 && line.substr(line.size() - 2) == ",1") ++on_front;
    }
    CHECK(rows == 50);
    CHECK(on_front == result.front.size());
}

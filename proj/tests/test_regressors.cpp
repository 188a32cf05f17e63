#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tidp/errors.hpp"
#include "tidp/regressors.hpp"
#include "tidp/rng.hpp"

using namespace tidp;

namespace {

FeatureTable table_from(const std::vector<std::vector<double>>& rows,
                        const std::vector<double>& y) {
    FeatureTable table;
    const int cols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
    table.values = Dense2D::zeros(static_cast<int>(rows.size()), cols);
    for (int i = 0; i < table.values.rows; ++i)
        for (int j = 0; j < cols; ++j)
            table.values.at(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    for (int j = 0; j < cols; ++j) table.feature_names.push_back("f" + std::to_string(j));
    table.target = y;
    return table;
}

FeatureTable random_table(Rng& rng, int rows, int cols) {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < rows; ++i) {
        std::vector<double> row;
        for (int j = 0; j < cols; ++j) row.push_back(rng.uniform(0.0, 10.0));
        double target = 5.0;
        for (int j = 0; j < cols; ++j) target += row[static_cast<std::size_t>(j)];
        x.push_back(row);
        y.push_back(target + rng.normal(0.0, 0.5));
    }
    return table_from(x, y);
}

double sse_of(const Regressor& model, const FeatureTable& table) {
    double sse = 0.0;
    const auto pred = model.predict(table.values);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - table.target[i];
        sse += d * d;
    }
    return sse;
}

/// Exhaustive best depth-1 split: tries every midpoint of every feature,
/// scoring by SSE of the two side means.
struct BruteSplit {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double left_mean = 0.0, right_mean = 0.0;
    double sse = std::numeric_limits<double>::infinity();
};

BruteSplit brute_force_stump(const Dense2D& x, const std::vector<double>& y,
                             int min_samples_leaf) {
    BruteSplit best;
    const auto n = static_cast<std::size_t>(x.rows);
    double total_sse = 0.0;
    {
        double mean = 0.0;
        for (const double v : y) mean += v;
        mean /= static_cast<double>(n);
        for (const double v : y) total_sse += (v - mean) * (v - mean);
    }
    best.sse = total_sse;
    for (int j = 0; j < x.cols; ++j) {
        std::vector<double> values;
        for (std::size_t i = 0; i < n; ++i) values.push_back(x.at(static_cast<int>(i), j));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t v = 1; v < values.size(); ++v) {
            const double threshold = (values[v - 1] + values[v]) / 2.0;
            double ls = 0.0, rs = 0.0;
            std::size_t ln = 0, rn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (x.at(static_cast<int>(i), j) < threshold) {
                    ls += y[i];
                    ++ln;
                } else {
                    rs += y[i];
                    ++rn;
                }
            }
            if (ln < static_cast<std::size_t>(min_samples_leaf) ||
                rn < static_cast<std::size_t>(min_samples_leaf))
                continue;
            const double lm = ls / static_cast<double>(ln);
            const double rm = rs / static_cast<double>(rn);
            double sse = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double m = x.at(static_cast<int>(i), j) < threshold ? lm : rm;
                sse += (y[i] - m) * (y[i] - m);
            }
            if (sse + 1e-12 < best.sse) {
                best = {true, j, threshold, lm, rm, sse};
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("dt: the {1,1,9,9} fixture splits in the middle") {
    const auto table =
        table_from({{1.0}, {2.0}, {3.0}, {4.0}}, {1.0, 1.0, 9.0, 9.0});
    RegressorConfig config;
    config.kind = ModelKind::dt;
    config.max_depth = 1;
    const auto model = fit_regressor(table, config);
    CHECK(model->predict_row({1.5}) == 1.0);
    CHECK(model->predict_row({3.7}) == 9.0);
    // Threshold is the midpoint between 2 and 3.
    const auto& dt = dynamic_cast<const DecisionTreeModel&>(*model);
    CHECK(dt.root.feature == 0);
    CHECK(dt.root.threshold == doctest::Approx(2.5));
}

TEST_CASE("dt: depth-1 fits equal brute force on 50 random fixtures") {
    Rng rng(404);
    for (int fixture = 0; fixture < 50; ++fixture) {
        const int rows = static_cast<int>(rng.uniform_int(2, 16));
        const int cols = static_cast<int>(rng.uniform_int(1, 4));
        std::vector<std::vector<double>> x;
        std::vector<double> y;
        for (int i = 0; i < rows; ++i) {
            std::vector<double> row;
            for (int j = 0; j < cols; ++j)
                row.push_back(static_cast<double>(rng.uniform_int(0, 8)));
            x.push_back(row);
            y.push_back(static_cast<double>(rng.uniform_int(0, 20)));
        }
        const auto table = table_from(x, y);

        TreeFitParams params;
        params.max_depth = 1;
        params.min_samples_leaf = 1;
        const TreeNode root = fit_tree_raw(table.values, y, params);
        const BruteSplit brute = brute_force_stump(table.values, y, 1);

        if (!brute.found) {
            CHECK(root.is_leaf());
            continue;
        }
        REQUIRE_FALSE(root.is_leaf());
        // The fitted stump must reach exactly the brute-force SSE (same split
        // or an equivalent-cost one).
        double sse = 0.0;
        for (int i = 0; i < table.values.rows; ++i) {
            const double p = predict_tree(root, table.values.row(i));
            const double d = p - y[static_cast<std::size_t>(i)];
            sse += d * d;
        }
        CHECK(sse == doctest::Approx(brute.sse).epsilon(1e-12));
    }
}

TEST_CASE("dt: min_samples_leaf blocks tiny leaves") {
    const auto table = table_from({{1.0}, {2.0}, {3.0}, {4.0}}, {1.0, 1.0, 1.0, 10.0});
    RegressorConfig config;
    config.kind = ModelKind::dt;
    config.max_depth = 3;
    config.min_samples_leaf = 2;
    const auto model = fit_regressor(table, config);
    // The natural {4} leaf is forbidden; splits must keep >= 2 rows per side.
    CHECK(model->predict_row({4.0}) == doctest::Approx(5.5));
}

TEST_CASE("gbdt: two-stage hand oracle") {
    // x = {0,1,2}, y = {0,2,10}, depth-1 trees, lr = 0.5.
    // Stage 0: base = 4. Residuals {-4,-2,6}: best stump splits at 1.5,
    // means {-3, 6}. F1 = {2.5, 2.5, 7}. Residuals {-2.5, -0.5, 3}:
    // stump splits at 1.5 again, means {-1.5, 3}.
    // F2 = {1.75, 1.75, 8.5}.
    const auto table = table_from({{0.0}, {1.0}, {2.0}}, {0.0, 2.0, 10.0});
    RegressorConfig config;
    config.kind = ModelKind::gbdt;
    config.n_trees = 2;
    config.max_depth = 1;
    config.learning_rate = 0.5;
    const auto model = fit_regressor(table, config);
    CHECK(model->predict_row({0.0}) == doctest::Approx(1.75));
    CHECK(model->predict_row({1.0}) == doctest::Approx(1.75));
    CHECK(model->predict_row({2.0}) == doctest::Approx(8.5));
}

TEST_CASE("gbdt: training SSE is non-increasing in rounds") {
    Rng rng(7);
    const auto table = random_table(rng, 60, 3);
    double prev = std::numeric_limits<double>::infinity();
    for (const int rounds : {1, 5, 20, 60}) {
        RegressorConfig config;
        config.kind = ModelKind::gbdt;
        config.n_trees = rounds;
        config.max_depth = 3;
        config.learning_rate = 0.1;
        const auto model = fit_regressor(table, config);
        const double sse = sse_of(*model, table);
        CHECK(sse <= prev + 1e-9);
        prev = sse;
    }
}

TEST_CASE("xgb: leaf weight is -G/(H+lambda) scaled by lr") {
    // Squared loss: g_i = 2 (pred - y_i), h_i = 2. Fixture y = {0, 8},
    // base = 4, lr = 1, one depth-1 tree. The split isolates each row:
    // left leaf G = 8, H = 2.
    const auto table = table_from({{0.0}, {1.0}}, {0.0, 8.0});
    RegressorConfig config;
    config.kind = ModelKind::xgb;
    config.n_trees = 1;
    config.max_depth = 1;
    config.learning_rate = 1.0;

    // lambda = 1 -> w = -8/3; predict 4 -+ 8/3.
    config.lambda = 1.0;
    auto model = fit_regressor(table, config);
    CHECK(model->predict_row({0.0}) == doctest::Approx(4.0 - 8.0 / 3.0));
    CHECK(model->predict_row({1.0}) == doctest::Approx(4.0 + 8.0 / 3.0));

    // lambda = 0 -> w = -G/H = -4 -> exact fit (mean residual per leaf).
    config.lambda = 0.0;
    model = fit_regressor(table, config);
    CHECK(model->predict_row({0.0}) == doctest::Approx(0.0));
    CHECK(model->predict_row({1.0}) == doctest::Approx(8.0));

    // Huge lambda -> weights vanish -> base prediction everywhere.
    config.lambda = 1e12;
    model = fit_regressor(table, config);
    CHECK(model->predict_row({0.0}) == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(model->predict_row({1.0}) == doctest::Approx(4.0).epsilon(1e-6));

    // A leaf holding two rows with residual +1 each: g = -2 per row, so
    // G = -4, H = 4, lambda = 1 -> w = 0.8. Fixture: x = {0,0,1},
    // y = {4,4,1}, base = 3; the stump isolates the x=0 pair.
    const auto table2 = table_from({{0.0}, {0.0}, {1.0}}, {4.0, 4.0, 1.0});
    config.lambda = 1.0;
    model = fit_regressor(table2, config);
    CHECK(model->predict_row({0.0}) == doctest::Approx(3.0 + 0.8));
}

TEST_CASE("knn: k=1 returns the nearest target") {
    const auto table = table_from({{0.0}, {10.0}, {20.0}}, {1.0, 2.0, 3.0});
    RegressorConfig config;
    config.kind = ModelKind::knn;
    config.k = 1;
    const auto model = fit_regressor(table, config);
    CHECK(model->predict_row({1.0}) == 1.0);
    CHECK(model->predict_row({11.0}) == 2.0);
    CHECK(model->predict_row({19.0}) == 3.0);
}

TEST_CASE("knn: k=n predicts the global mean") {
    const auto table = table_from({{0.0}, {10.0}, {20.0}}, {1.0, 2.0, 6.0});
    RegressorConfig config;
    config.kind = ModelKind::knn;
    config.k = 3;
    const auto model = fit_regressor(table, config);
    CHECK(model->predict_row({5.0}) == doctest::Approx(3.0));
    CHECK(model->predict_row({100.0}) == doctest::Approx(3.0));
}

TEST_CASE("knn: matches a brute-force neighbour scan") {
    Rng rng(55);
    const auto table = random_table(rng, 30, 4);
    RegressorConfig config;
    config.kind = ModelKind::knn;
    config.k = 5;
    const auto model = fit_regressor(table, config);

    // Standardize with the same population statistics.
    std::vector<double> means(4, 0.0), sds(4, 0.0);
    for (int j = 0; j < 4; ++j) {
        for (int i = 0; i < 30; ++i) means[static_cast<std::size_t>(j)] += table.values.at(i, j);
        means[static_cast<std::size_t>(j)] /= 30.0;
        for (int i = 0; i < 30; ++i) {
            const double d = table.values.at(i, j) - means[static_cast<std::size_t>(j)];
            sds[static_cast<std::size_t>(j)] += d * d;
        }
        sds[static_cast<std::size_t>(j)] = std::sqrt(sds[static_cast<std::size_t>(j)] / 30.0);
    }
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> q;
        for (int j = 0; j < 4; ++j) q.push_back(rng.uniform(0.0, 10.0));
        std::vector<std::pair<double, std::size_t>> dist;
        for (int i = 0; i < 30; ++i) {
            double d2 = 0.0;
            for (int j = 0; j < 4; ++j) {
                const auto ju = static_cast<std::size_t>(j);
                const double a = (q[ju] - means[ju]) / sds[ju];
                const double b = (table.values.at(i, j) - means[ju]) / sds[ju];
                d2 += (a - b) * (a - b);
            }
            dist.emplace_back(d2, static_cast<std::size_t>(i));
        }
        std::sort(dist.begin(), dist.end());
        double expected = 0.0;
        for (int k = 0; k < 5; ++k) expected += table.target[dist[static_cast<std::size_t>(k)].second];
        expected /= 5.0;
        CHECK(model->predict_row(q) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("knn: k larger than the training set is a config error") {
    const auto table = table_from({{0.0}, {1.0}}, {1.0, 2.0});
    RegressorConfig config;
    config.kind = ModelKind::knn;
    config.k = 3;
    CHECK_THROWS_AS(fit_regressor(table, config), ConfigError);
}

TEST_CASE("ols: recovers a noiseless line") {
    const auto table = table_from({{0.0}, {1.0}, {2.0}, {3.0}}, {1.0, 3.0, 5.0, 7.0});
    RegressorConfig config;
    config.kind = ModelKind::ols;
    const auto model = fit_regressor(table, config);
    const auto& ols = dynamic_cast<const OlsModel&>(*model);
    REQUIRE(ols.coefficients.size() == 2);
    CHECK(ols.coefficients[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(ols.coefficients[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(model->predict_row({10.0}) == doctest::Approx(21.0).epsilon(1e-9));
}

TEST_CASE("ols: residuals are orthogonal to the design") {
    Rng rng(23);
    const auto table = random_table(rng, 40, 3);
    RegressorConfig config;
    config.kind = ModelKind::ols;
    const auto model = fit_regressor(table, config);
    const auto pred = model->predict(table.values);
    for (int j = 0; j < 3; ++j) {
        double dot = 0.0;
        for (int i = 0; i < 40; ++i)
            dot += table.values.at(i, j) * (table.target[static_cast<std::size_t>(i)] -
                                            pred[static_cast<std::size_t>(i)]);
        CHECK(std::abs(dot) < 1e-7);
    }
    double sum = 0.0;
    for (int i = 0; i < 40; ++i)
        sum += table.target[static_cast<std::size_t>(i)] - pred[static_cast<std::size_t>(i)];
    CHECK(std::abs(sum) < 1e-7);
}

TEST_CASE("ols: duplicated column raises SingularityError naming it") {
    FeatureTable table;
    table.feature_names = {"length", "length_copy"};
    table.values = Dense2D::zeros(5, 2);
    for (int i = 0; i < 5; ++i) {
        table.values.at(i, 0) = i;
        table.values.at(i, 1) = i;  // exact copy
        table.target.push_back(2.0 * i + 1.0);
    }
    RegressorConfig config;
    config.kind = ModelKind::ols;
    try {
        fit_regressor(table, config);
        FAIL("expected SingularityError");
    } catch (const SingularityError& e) {
        CHECK(std::string(e.what()).find("length") != std::string::npos);
    }
}

TEST_CASE("ols: more features than rows is insufficient data") {
    const auto table = table_from({{1.0, 2.0, 3.0}}, {1.0});
    RegressorConfig config;
    config.kind = ModelKind::ols;
    CHECK_THROWS_AS(fit_regressor(table, config), InsufficientDataError);
}

TEST_CASE("svr: epsilon tube captures a clean line") {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < 20; ++i) {
        x.push_back({static_cast<double>(i)});
        y.push_back(3.0 * i + 10.0);
    }
    const auto table = table_from(x, y);
    RegressorConfig config;
    config.kind = ModelKind::svr;
    config.epsilon = 1.0;
    config.svr_lr = 0.01;
    config.svr_epochs = 2000;
    config.svr_c = 10.0;
    const auto model = fit_regressor(table, config);
    for (int i = 0; i < 20; ++i) {
        const double pred = model->predict_row({static_cast<double>(i)});
        CHECK(std::abs(pred - y[static_cast<std::size_t>(i)]) <= config.epsilon + 0.5);
    }
}

TEST_CASE("svr: huge epsilon drives weights to zero") {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < 10; ++i) {
        x.push_back({static_cast<double>(i)});
        y.push_back(2.0 * i);
    }
    const auto table = table_from(x, y);
    RegressorConfig config;
    config.kind = ModelKind::svr;
    config.epsilon = 1e6;  // every residual inside the tube
    config.svr_epochs = 500;
    const auto model = fit_regressor(table, config);
    const auto& svr = dynamic_cast<const SvrModel&>(*model);
    for (const double w : svr.w) CHECK(std::abs(w) < 1e-6);
}

TEST_CASE("rf: averages trees and stays deterministic") {
    Rng rng(83);
    const auto table = random_table(rng, 50, 3);
    RegressorConfig config;
    config.kind = ModelKind::rf;
    config.n_trees = 20;
    config.max_depth = 4;
    config.seed = 9;
    const auto a = fit_regressor(table, config);
    const auto b = fit_regressor(table, config);
    for (int i = 0; i < 5; ++i) {
        std::vector<double> q{rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0),
                              rng.uniform(0.0, 10.0)};
        CHECK(a->predict_row(q) == b->predict_row(q));
    }
    config.seed = 10;
    const auto c = fit_regressor(table, config);
    bool any_diff = false;
    for (int i = 0; i < 5; ++i) {
        std::vector<double> q{rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0),
                              rng.uniform(0.0, 10.0)};
        any_diff |= a->predict_row(q) != c->predict_row(q);
    }
    CHECK(any_diff);
}

TEST_CASE("regressors: permutation invariance for deterministic kinds") {
    Rng rng(301);
    const auto table = random_table(rng, 25, 3);

    // Row-permuted copy.
    FeatureTable shuffled = table;
    std::vector<std::size_t> order(25);
    for (std::size_t i = 0; i < 25; ++i) order[i] = i;
    Rng perm(77);
    perm.shuffle(order);
    for (std::size_t i = 0; i < 25; ++i) {
        for (int j = 0; j < 3; ++j)
            shuffled.values.at(static_cast<int>(i), j) =
                table.values.at(static_cast<int>(order[i]), j);
        shuffled.target[i] = table.target[order[i]];
    }

    for (const ModelKind kind : {ModelKind::dt, ModelKind::knn, ModelKind::ols}) {
        RegressorConfig config;
        config.kind = kind;
        config.k = 5;
        const auto a = fit_regressor(table, config);
        const auto b = fit_regressor(shuffled, config);
        for (int trial = 0; trial < 8; ++trial) {
            std::vector<double> q{rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0),
                                  rng.uniform(0.0, 10.0)};
            CHECK(a->predict_row(q) == b->predict_row(q));
        }
    }
}

TEST_CASE("regressors: fixed seed reproduces stochastic kinds") {
    Rng rng(302);
    const auto table = random_table(rng, 40, 3);
    for (const ModelKind kind :
         {ModelKind::rf, ModelKind::gbdt, ModelKind::xgb, ModelKind::svr}) {
        RegressorConfig config;
        config.kind = kind;
        config.n_trees = 10;
        config.seed = 12345;
        const auto a = fit_regressor(table, config);
        const auto b = fit_regressor(table, config);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> q{rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0),
                                  rng.uniform(0.0, 10.0)};
            CHECK(a->predict_row(q) == b->predict_row(q));
        }
    }
}

TEST_CASE("regressors: table validation rejects bad input") {
    RegressorConfig config;
    config.kind = ModelKind::dt;
    FeatureTable empty;
    CHECK_THROWS_AS(fit_regressor(empty, config), InsufficientDataError);

    auto bad = table_from({{1.0}, {2.0}}, {1.0});
    CHECK_THROWS_AS(fit_regressor(bad, config), DimensionError);

    auto nonpos = table_from({{1.0}, {2.0}}, {3.0, 0.0});
    CHECK_THROWS_AS(fit_regressor(nonpos, config), SchemaError);

    auto nonfinite = table_from({{1.0}, {2.0}}, {3.0, 4.0});
    nonfinite.values.at(1, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fit_regressor(nonfinite, config), SchemaError);
}

TEST_CASE("regressors: config validation") {
    RegressorConfig config;
    config.kind = ModelKind::gbdt;
    config.learning_rate = 0.0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config.learning_rate = 1.5;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config.learning_rate = 0.1;
    CHECK_NOTHROW(config.validate());
    config.kind = ModelKind::knn;
    config.k = 0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config.kind = ModelKind::xgb;
    config.k = 5;
    config.lambda = -1.0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("regressors: model kind names round-trip") {
    for (const ModelKind kind : kAllModelKinds)
        CHECK(model_kind_from_string(to_string(kind)) == kind);
    CHECK_THROWS(model_kind_from_string("mlp"));
}

TEST_CASE("serialization: every kind survives a round-trip") {
    Rng rng(610);
    const auto table = random_table(rng, 30, 3);
    for (const ModelKind kind : kAllModelKinds) {
        RegressorConfig config;
        config.kind = kind;
        config.n_trees = 8;
        config.k = 4;
        config.svr_epochs = 50;
        const auto model = fit_regressor(table, config);
        std::ostringstream out;
        save_regressor(*model, out);
        std::istringstream in(out.str());
        const auto back = load_regressor(in);
        CHECK(back->kind() == kind);
        CHECK(back->feature_names == model->feature_names);
        for (int trial = 0; trial < 6; ++trial) {
            std::vector<double> q{rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0),
                                  rng.uniform(0.0, 10.0)};
            CHECK(back->predict_row(q) == model->predict_row(q));
        }
    }
}

TEST_CASE("serialization: garbage input is a schema error") {
    std::istringstream not_json("not json at all");
    CHECK_THROWS_AS(load_regressor(not_json), SchemaError);
    std::istringstream wrong_format(R"({"format":"other","version":1})");
    CHECK_THROWS_AS(load_regressor(wrong_format), SchemaError);
    CHECK_THROWS_AS(load_regressor_file("/nonexistent/path.json"), MissingArtifactError);
}

#include <doctest.h>

#include <cmath>

#include "tidp/errors.hpp"
#include "tidp/metrics.hpp"
#include "tidp/rng.hpp"

using namespace tidp;

TEST_CASE("mape: hand examples") {
    // |10-12|/10 = 0.2, |20-15|/20 = 0.25 -> mean 0.225 -> 22.5%.
    CHECK(mape({10.0, 20.0}, {12.0, 15.0}) == doctest::Approx(22.5).epsilon(1e-9));
    CHECK(mape({100.0}, {50.0}) == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(mape({5.0, 5.0}, {5.0, 5.0}) == 0.0);
}

TEST_CASE("mape: zero actual is an error naming the index") {
    CHECK_THROWS_WITH_AS(mape({10.0, 0.0}, {1.0, 1.0}), doctest::Contains("index 1"),
                         NumericError);
}

TEST_CASE("rmse: hand examples") {
    // Errors -1, 0, 1 -> sqrt(2/3).
    CHECK(rmse({1.0, 2.0, 3.0}, {2.0, 2.0, 2.0}) ==
          doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-9));
    CHECK(rmse({3.0}, {0.0}) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(rmse({4.0, 4.0}, {4.0, 4.0}) == 0.0);
}

TEST_CASE("mae: hand examples") {
    CHECK(mae({1.0, 2.0, 3.0}, {2.0, 2.0, 2.0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(mae({10.0}, {7.5}) == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("smape: hand examples and symmetry") {
    // |10-30| / ((10+30)/2) = 20/20 = 1 -> 100%.
    CHECK(smape({10.0}, {30.0}) == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(smape({30.0}, {10.0}) == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(smape({7.0, 9.0}, {7.0, 9.0}) == 0.0);
    CHECK_THROWS_AS(smape({0.0}, {0.0}), NumericError);
}

TEST_CASE("metrics: empty or mismatched vectors throw") {
    CHECK_THROWS_AS(mape({}, {}), DimensionError);
    CHECK_THROWS_AS(rmse({1.0}, {1.0, 2.0}), DimensionError);
    CHECK_THROWS_AS(mae({1.0, 2.0}, {1.0}), DimensionError);
}

TEST_CASE("metrics: scale properties on random vectors") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 40));
        std::vector<double> actual(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            actual[i] = rng.uniform(1.0, 100.0);
            pred[i] = rng.uniform(1.0, 100.0);
        }
        const double c = rng.uniform(0.5, 4.0);
        std::vector<double> actual_c(n), pred_c(n);
        for (std::size_t i = 0; i < n; ++i) {
            actual_c[i] = c * actual[i];
            pred_c[i] = c * pred[i];
        }
        // RMSE and MAE scale linearly with c; MAPE and SMAPE are invariant.
        CHECK(rmse(actual_c, pred_c) ==
              doctest::Approx(c * rmse(actual, pred)).epsilon(1e-9));
        CHECK(mae(actual_c, pred_c) == doctest::Approx(c * mae(actual, pred)).epsilon(1e-9));
        CHECK(mape(actual_c, pred_c) == doctest::Approx(mape(actual, pred)).epsilon(1e-9));
        CHECK(smape(actual_c, pred_c) == doctest::Approx(smape(actual, pred)).epsilon(1e-9));
        // RMSE dominates MAE; both are nonnegative.
        CHECK(rmse(actual, pred) >= mae(actual, pred) - 1e-12);
    }
}

TEST_CASE("compute_metrics: fills all four") {
    const MetricSet m = compute_metrics({10.0, 20.0}, {12.0, 15.0});
    CHECK(m.mape == doctest::Approx(22.5));
    CHECK(m.rmse == doctest::Approx(std::sqrt((4.0 + 25.0) / 2.0)));
    CHECK(m.mae == doctest::Approx(3.5));
    CHECK(m.smape > 0.0);
}

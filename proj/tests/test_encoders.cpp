#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tidp/encoders.hpp"
#include "tidp/errors.hpp"
#include "tidp/ingest.hpp"

using namespace tidp;

namespace {

std::vector<IncidentRecord> tiny_corpus(int n) {
    std::vector<IncidentRecord> records;
    for (int i = 0; i < n; ++i) {
        IncidentRecord rec;
        rec.id = "r" + std::to_string(i);
        const bool blocked = i % 2 == 0;
        rec.description = blocked ? "lane blocked after crash number " + std::to_string(i)
                                  : "vehicle on shoulder number " + std::to_string(i);
        rec.severity = blocked ? 4 : 1;
        rec.duration_min = 30;
        records.push_back(rec);
    }
    return records;
}

}  // namespace

TEST_CASE("text_to_binary: bits are 7 bit ascii, lsb first") {
    const Dense2D m = text_to_binary("a");
    REQUIRE(m.rows == kTextSteps);
    REQUIRE(m.cols == kTextBits);
    // 'a' = 0x61 = 1100001b -> LSB first: 1 0 0 0 0 1 1.
    const std::vector<double> expected{1, 0, 0, 0, 0, 1, 1};
    for (int j = 0; j < kTextBits; ++j) CHECK(m.at(0, j) == expected[static_cast<std::size_t>(j)]);
    // Single char repeats across all steps.
    for (int j = 0; j < kTextBits; ++j) CHECK(m.at(199, j) == m.at(0, j));
}

TEST_CASE("text_to_binary: short text cycles") {
    const Dense2D m = text_to_binary("abc");
    // Row 3 repeats row 0.
    for (int j = 0; j < kTextBits; ++j) {
        CHECK(m.at(3, j) == m.at(0, j));
        CHECK(m.at(4, j) == m.at(1, j));
    }
    // Rows 0 and 1 differ ('a' vs 'b').
    bool differs = false;
    for (int j = 0; j < kTextBits; ++j) differs |= m.at(0, j) != m.at(1, j);
    CHECK(differs);
}

TEST_CASE("text_to_binary: lowercases and sanitizes") {
    const Dense2D upper = text_to_binary("CRASH");
    const Dense2D lower = text_to_binary("crash");
    for (int t = 0; t < kTextSteps; ++t)
        for (int j = 0; j < kTextBits; ++j) CHECK(upper.at(t, j) == lower.at(t, j));
    CHECK_THROWS_AS(text_to_binary(""), EncodingError);
    CHECK_THROWS_AS(text_to_binary("   "), EncodingError);
}

TEST_CASE("encoders: unit and activation grids") {
    CHECK(kUnitGrid == std::array<int, 5>{2, 4, 8, 12, 16});
    REQUIRE(kActivationGrid.size() == 4);
}

TEST_CASE("encoder config validation") {
    EncoderConfig config;
    config.units = 8;
    config.activation = nn::Activation::relu;
    CHECK_NOTHROW(config.validate());
    config.units = 7;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config.units = 8;
    config.epochs = 0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("sentiment encoder: output dims, codomain, determinism") {
    const auto records = tiny_corpus(30);
    EncoderConfig config;
    config.units = 4;
    config.activation = nn::Activation::sigmoid;
    config.epochs = 2;
    config.seed = 5;
    TrainingReport report;
    const SentimentEncoder enc = train_sentiment_encoder(records, config, &report);
    CHECK(report.train_loss.size() == 2);
    CHECK(report.val_loss.size() == 2);
    CHECK(report.n_train == 21);
    CHECK(report.n_val == 6);
    CHECK(report.n_test == 3);
    for (const double l : report.train_loss) CHECK(std::isfinite(l));

    const auto v = enc.encode("two lanes blocked near the bridge");
    REQUIRE(v.size() == 4);
    for (const double x : v) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
    // Same config, same seed: bit-identical retrain.
    const SentimentEncoder enc2 = train_sentiment_encoder(records, config, nullptr);
    CHECK(enc2.encode("two lanes blocked near the bridge") == v);
}

TEST_CASE("sentiment encoder: tanh codomain") {
    const auto records = tiny_corpus(20);
    EncoderConfig config;
    config.units = 2;
    config.activation = nn::Activation::tanh;
    config.epochs = 1;
    const SentimentEncoder enc = train_sentiment_encoder(records, config, nullptr);
    const auto v = enc.encode("crash blocked all lanes");
    for (const double x : v) {
        CHECK(x >= -1.0);
        CHECK(x <= 1.0);
    }
}

TEST_CASE("sentiment encoder: cross entropy head trains too") {
    const auto records = tiny_corpus(20);
    EncoderConfig config;
    config.units = 2;
    config.activation = nn::Activation::relu;
    config.head = SentimentHead::ce;
    config.epochs = 2;
    TrainingReport report;
    const SentimentEncoder enc = train_sentiment_encoder(records, config, &report);
    CHECK(std::isfinite(report.test_loss));
    CHECK(enc.encode("anything at all").size() == 2);
}

TEST_CASE("sentiment encoder: save/load round-trip") {
    const auto records = tiny_corpus(20);
    EncoderConfig config;
    config.units = 3;
    config.activation = nn::Activation::elu;
    config.epochs = 1;
    const SentimentEncoder enc = train_sentiment_encoder(records, config, nullptr);
    std::ostringstream out;
    enc.save(out);
    std::istringstream in(out.str());
    const SentimentEncoder back = SentimentEncoder::load(in);
    const char* text = "overturned truck blocked two lanes";
    CHECK(back.encode(text) == enc.encode(text));
}

TEST_CASE("sentiment encoder: too few records throws") {
    CHECK_THROWS_AS(train_sentiment_encoder(tiny_corpus(2), EncoderConfig{}, nullptr),
                    InsufficientDataError);
}

TEST_CASE("autoencoder: constant series reconstructs to tiny error") {
    std::vector<std::vector<double>> pool(40, std::vector<double>(kWindowSlots, 0.6));
    EncoderConfig config;
    config.units = 4;
    config.activation = nn::Activation::relu;
    config.epochs = 15;
    config.seed = 2;
    TrainingReport report;
    const SeriesAutoencoder ae = train_autoencoder(pool, config, &report);
    const auto recon = ae.reconstruct(pool[0]);
    REQUIRE(recon.size() == pool[0].size());
    double mse = 0.0;
    for (std::size_t i = 0; i < recon.size(); ++i) {
        const double d = recon[i] - pool[0][i];
        mse += d * d;
    }
    mse /= static_cast<double>(recon.size());
    CHECK(mse < 1e-3);
}

TEST_CASE("autoencoder: encode honors units and activation codomain") {
    std::vector<std::vector<double>> pool(20, std::vector<double>(kWindowSlots, 0.3));
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i][10] = 0.1 * static_cast<double>(i % 5);
    EncoderConfig config;
    config.units = 6;
    config.activation = nn::Activation::sigmoid;
    config.epochs = 2;
    const SeriesAutoencoder ae = train_autoencoder(pool, config, nullptr);
    const auto v = ae.encode(pool[3]);
    REQUIRE(v.size() == 6);
    for (const double x : v) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
}

TEST_CASE("autoencoder: save/load round-trip") {
    std::vector<std::vector<double>> pool(15, std::vector<double>(kWindowSlots, 0.5));
    EncoderConfig config;
    config.units = 2;
    config.activation = nn::Activation::tanh;
    config.epochs = 1;
    SeriesAutoencoder ae = train_autoencoder(pool, config, nullptr);
    ae.norm = {72.5, 1800.0};
    std::ostringstream out;
    ae.save(out);
    std::istringstream in(out.str());
    const SeriesAutoencoder back = SeriesAutoencoder::load(in);
    CHECK(back.norm.speed_max == 72.5);
    CHECK(back.encode(pool[0]) == ae.encode(pool[0]));
}

TEST_CASE("autoencoder: rejects wrong window length") {
    std::vector<std::vector<double>> pool(15, std::vector<double>(kWindowSlots, 0.5));
    EncoderConfig config;
    config.units = 2;
    config.activation = nn::Activation::relu;
    config.epochs = 1;
    const SeriesAutoencoder ae = train_autoencoder(pool, config, nullptr);
    CHECK_THROWS_AS(ae.encode(std::vector<double>(10, 0.5)), DimensionError);
}

TEST_CASE("encoded vectors: csv round-trip") {
    std::vector<EncodedVector> vectors;
    EncodedVector a;
    a.incident_id = "i1";
    a.source = FeatureSource::speed;
    a.units = 4;
    a.activation = nn::Activation::relu;
    a.values = {0.25, 0.5, 0.125, 1.0};
    EncodedVector b;
    b.incident_id = "i2";
    b.source = FeatureSource::lstm_sent;
    b.units = 2;
    b.activation = nn::Activation::tanh;
    b.values = {-0.5, 0.75};
    vectors.push_back(a);
    vectors.push_back(b);

    std::ostringstream out;
    write_encoded_csv(out, vectors);
    std::istringstream in(out.str());
    const auto back = read_encoded_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].incident_id == "i1");
    CHECK(back[0].source == FeatureSource::speed);
    CHECK(back[0].units == 4);
    CHECK(back[0].activation == nn::Activation::relu);
    CHECK(back[0].values == a.values);
    CHECK(back[1].values == b.values);
}

TEST_CASE("feature sources: names round-trip") {
    for (const FeatureSource s : kAllSources) {
        CHECK(source_from_string(to_string(s)) == s);
    }
    CHECK(std::string(to_string(FeatureSource::lstm_sent)) == "LSTM-sent");
    CHECK(std::string(to_string(FeatureSource::sd)) == "SD");
    CHECK_THROWS(source_from_string("bogus"));
}

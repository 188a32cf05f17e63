#include "tidp/encoders.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "nn_json.hpp"
#include "tidp/csv.hpp"
#include "tidp/errors.hpp"
#include "tidp/nn/loss.hpp"
#include "tidp/nn/optimizer.hpp"
#include "tidp/rng.hpp"

namespace tidp {

const std::array<int, 5> kUnitGrid = {2, 4, 8, 12, 16};
const std::array<nn::Activation, 4> kActivationGrid = {
    nn::Activation::relu, nn::Activation::elu, nn::Activation::tanh, nn::Activation::sigmoid};

SentimentHead head_from_string(std::string_view name) {
    if (name == "mse") return SentimentHead::mse;
    if (name == "ce") return SentimentHead::cross_entropy;
    throw ConfigError("unknown sentiment head: " + std::string(name));
}

const char* to_string(SentimentHead head) {
    return head == SentimentHead::mse ? "mse" : "ce";
}

void EncoderConfig::validate() const {
    if (std::find(kUnitGrid.begin(), kUnitGrid.end(), units) == kUnitGrid.end())
        throw ConfigError("units must be one of {2,4,8,12,16}, got " + std::to_string(units));
    if (std::find(kActivationGrid.begin(), kActivationGrid.end(), activation) ==
        kActivationGrid.end())
        throw ConfigError("bottleneck activation must be relu, elu, tanh, or sigmoid");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
}

Dense2D text_to_binary(std::string_view description) {
    std::string sanitized;
    sanitized.reserve(description.size());
    bool has_content = false;
    for (const char raw : description) {
        const auto uc = static_cast<unsigned char>(raw);
        const char c = uc < 128 ? static_cast<char>(std::tolower(uc)) : ' ';
        if (c != ' ') has_content = true;
        sanitized.push_back(c);
    }
    if (!has_content) throw EncodingError("description empty after sanitizing");

    std::string repeated;
    repeated.reserve(kTextSteps + sanitized.size());
    while (repeated.size() < static_cast<std::size_t>(kTextSteps)) repeated += sanitized;
    repeated.resize(kTextSteps);

    Dense2D bits = Dense2D::zeros(kTextSteps, kTextBits);
    for (int i = 0; i < kTextSteps; ++i) {
        const auto code = static_cast<unsigned>(repeated[static_cast<std::size_t>(i)]);
        for (int b = 0; b < kTextBits; ++b)
            bits.at(static_cast<std::size_t>(i), static_cast<std::size_t>(b)) =
                static_cast<double>((code >> b) & 1u);
    }
    return bits;
}

namespace {

struct IndexSplit {
    std::vector<std::size_t> train, val, test;
};

// 70:20:10 by seeded shuffle; sizes floor(0.7n) / floor(0.2n) / remainder.
IndexSplit split_703010(std::size_t n, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng.shuffle(idx);
    IndexSplit split;
    const std::size_t n_train = n * 7 / 10;
    const std::size_t n_val = n * 2 / 10;
    split.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.val.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                     idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    split.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
    return split;
}

std::vector<nn::ParamBlock> concat_blocks(std::initializer_list<std::vector<nn::ParamBlock>> lists) {
    std::vector<nn::ParamBlock> all;
    for (const auto& list : lists)
        for (const auto& block : list) all.push_back(block);
    return all;
}

nlohmann::json config_to_json(const EncoderConfig& config) {
    return {{"units", config.units},
            {"activation", nn::to_string(config.activation)},
            {"head", to_string(config.head)},
            {"epochs", config.epochs},
            {"seed", config.seed},
            {"learning_rate", config.learning_rate}};
}

EncoderConfig config_from_json(const nlohmann::json& j) {
    EncoderConfig config;
    config.units = j.at("units").get<int>();
    config.activation = nn::activation_from_string(j.at("activation").get<std::string>());
    config.head = head_from_string(j.at("head").get<std::string>());
    config.epochs = j.at("epochs").get<int>();
    config.seed = j.at("seed").get<std::uint64_t>();
    config.learning_rate = j.at("learning_rate").get<double>();
    return config;
}

void check_format(const nlohmann::json& j, const char* kind) {
    if (j.value("format", "") != "tidp-encoder")
        throw SchemaError("not an encoder model file");
    if (j.value("version", 0) != 1)
        throw SchemaError("unsupported encoder model version");
    if (j.value("kind", "") != kind)
        throw SchemaError(std::string("expected a ") + kind + " model file");
}

}  // namespace

std::vector<double> SentimentEncoder::encode(std::string_view description) const {
    const Dense2D bits = text_to_binary(description);
    const std::vector<double> h = lstm.forward(bits, nullptr);
    std::vector<double> pre(static_cast<std::size_t>(bottleneck.out));
    std::vector<double> post(static_cast<std::size_t>(bottleneck.out));
    bottleneck.forward(h.data(), pre.data(), post.data());
    return post;
}

void SentimentEncoder::save(std::ostream& out) const {
    nlohmann::json j = {{"format", "tidp-encoder"},
                        {"version", 1},
                        {"kind", "sentiment"},
                        {"config", config_to_json(config)},
                        {"lstm", nn::lstm_to_json(lstm)},
                        {"bottleneck", nn::dense_to_json(bottleneck)},
                        {"head", nn::dense_to_json(head)}};
    out << j.dump(2) << "\n";
}

void SentimentEncoder::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw MissingArtifactError("cannot write encoder model: " + path);
    save(out);
}

SentimentEncoder SentimentEncoder::load(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("encoder model file is not valid JSON: ") + e.what());
    }
    check_format(j, "sentiment");
    SentimentEncoder enc;
    enc.config = config_from_json(j.at("config"));
    enc.lstm = nn::lstm_from_json(j.at("lstm"));
    enc.bottleneck = nn::dense_from_json(j.at("bottleneck"));
    enc.head = nn::dense_from_json(j.at("head"));
    if (enc.bottleneck.out != enc.config.units)
        throw SchemaError("encoder model file: bottleneck width does not match config");
    return enc;
}

SentimentEncoder SentimentEncoder::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("cannot open encoder model: " + path);
    return load(in);
}

SentimentEncoder train_sentiment_encoder(const std::vector<IncidentRecord>& records,
                                         const EncoderConfig& config, TrainingReport* report) {
    config.validate();
    if (records.size() < static_cast<std::size_t>(kMinSentimentRecords))
        throw InsufficientDataError("sentiment encoder needs at least " +
                                    std::to_string(kMinSentimentRecords) + " records, got " +
                                    std::to_string(records.size()));

    const std::size_t n = records.size();
    std::vector<Dense2D> inputs;
    inputs.reserve(n);
    std::vector<int> severity(n);
    for (std::size_t i = 0; i < n; ++i) {
        inputs.push_back(text_to_binary(records[i].description));
        severity[i] = records[i].severity;
    }

    SentimentEncoder enc;
    enc.config = config;
    enc.lstm = nn::Lstm(kTextBits, kLstmHidden);
    enc.bottleneck = nn::Dense(kLstmHidden, config.units, config.activation);
    const int head_out = config.head == SentimentHead::mse ? 1 : kSeverityClasses;
    enc.head = nn::Dense(config.units, head_out, nn::Activation::identity);

    Rng rng(config.seed);
    enc.lstm.init(rng);
    enc.bottleneck.init(rng);
    enc.head.init(rng);
    IndexSplit split = split_703010(n, rng);

    auto blocks = concat_blocks(
        {enc.lstm.param_blocks(), enc.bottleneck.param_blocks(), enc.head.param_blocks()});
    nn::Adam adam(config.learning_rate);

    std::vector<double> b_pre(static_cast<std::size_t>(config.units));
    std::vector<double> b_post(static_cast<std::size_t>(config.units));
    std::vector<double> h_pre(static_cast<std::size_t>(head_out));
    std::vector<double> h_post(static_cast<std::size_t>(head_out));

    auto head_loss = [&](std::size_t i, std::vector<double>* grad) {
        if (config.head == SentimentHead::mse)
            return nn::mse(h_post, {static_cast<double>(severity[i])}, grad);
        return nn::softmax_cross_entropy(h_post, severity[i], grad);
    };

    auto sample_loss = [&](std::size_t i) {
        const std::vector<double> h = enc.lstm.forward(inputs[i], nullptr);
        enc.bottleneck.forward(h.data(), b_pre.data(), b_post.data());
        enc.head.forward(b_post.data(), h_pre.data(), h_post.data());
        return head_loss(i, nullptr);
    };
    auto mean_loss = [&](const std::vector<std::size_t>& idx) {
        if (idx.empty()) return 0.0;
        double total = 0.0;
        for (const std::size_t i : idx) total += sample_loss(i);
        return total / static_cast<double>(idx.size());
    };

    if (report != nullptr) {
        *report = TrainingReport{};
        report->n_train = static_cast<int>(split.train.size());
        report->n_val = static_cast<int>(split.val.size());
        report->n_test = static_cast<int>(split.test.size());
    }

    nn::Lstm::Trace trace;
    std::vector<double> grad_head, grad_bottleneck, grad_h;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(split.train);
        double epoch_total = 0.0;
        for (std::size_t start = 0; start < split.train.size(); start += kBatchSize) {
            const std::size_t stop = std::min(split.train.size(), start + kBatchSize);
            const double batch_n = static_cast<double>(stop - start);
            nn::zero_grads(blocks);
            for (std::size_t b = start; b < stop; ++b) {
                const std::size_t i = split.train[b];
                const std::vector<double> h = enc.lstm.forward(inputs[i], &trace);
                enc.bottleneck.forward(h.data(), b_pre.data(), b_post.data());
                enc.head.forward(b_post.data(), h_pre.data(), h_post.data());
                epoch_total += head_loss(i, &grad_head);
                for (auto& g : grad_head) g /= batch_n;
                grad_bottleneck.resize(static_cast<std::size_t>(config.units));
                enc.head.backward(b_post.data(), h_pre.data(), grad_head.data(),
                                  grad_bottleneck.data());
                grad_h.resize(kLstmHidden);
                enc.bottleneck.backward(h.data(), b_pre.data(), grad_bottleneck.data(),
                                        grad_h.data());
                enc.lstm.backward(inputs[i], trace, grad_h);
            }
            adam.step(blocks);
        }
        if (report != nullptr) {
            report->train_loss.push_back(epoch_total /
                                         static_cast<double>(split.train.size()));
            report->val_loss.push_back(mean_loss(split.val));
        }
    }
    if (report != nullptr) report->test_loss = mean_loss(split.test);
    return enc;
}

std::vector<double> SeriesAutoencoder::encode(const std::vector<double>& series) const {
    if (static_cast<int>(series.size()) != kWindowSlots)
        throw DimensionError("autoencoder input must have " + std::to_string(kWindowSlots) +
                             " values");
    std::vector<double> current = series;
    std::vector<double> pre, post;
    for (std::size_t l = 0; l < 2 && l < net.layers.size(); ++l) {
        const nn::Dense& layer = net.layers[l];
        pre.resize(static_cast<std::size_t>(layer.out));
        post.resize(static_cast<std::size_t>(layer.out));
        layer.forward(current.data(), pre.data(), post.data());
        current = post;
    }
    return current;
}

std::vector<double> SeriesAutoencoder::reconstruct(const std::vector<double>& series) const {
    if (static_cast<int>(series.size()) != kWindowSlots)
        throw DimensionError("autoencoder input must have " + std::to_string(kWindowSlots) +
                             " values");
    return net.forward(series);
}

void SeriesAutoencoder::save(std::ostream& out) const {
    nlohmann::json j = {{"format", "tidp-encoder"},
                        {"version", 1},
                        {"kind", "autoencoder"},
                        {"config", config_to_json(config)},
                        {"norm", {{"speed_max", norm.speed_max}, {"flow_max", norm.flow_max}}},
                        {"net", nn::mlp_to_json(net)}};
    out << j.dump(2) << "\n";
}

void SeriesAutoencoder::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw MissingArtifactError("cannot write encoder model: " + path);
    save(out);
}

SeriesAutoencoder SeriesAutoencoder::load(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("encoder model file is not valid JSON: ") + e.what());
    }
    check_format(j, "autoencoder");
    SeriesAutoencoder ae;
    ae.config = config_from_json(j.at("config"));
    ae.norm.speed_max = j.at("norm").at("speed_max").get<double>();
    ae.norm.flow_max = j.at("norm").at("flow_max").get<double>();
    ae.net = nn::mlp_from_json(j.at("net"));
    if (ae.net.layers.size() != 4 || ae.net.layers[1].out != ae.config.units)
        throw SchemaError("encoder model file: autoencoder shape does not match config");
    return ae;
}

SeriesAutoencoder SeriesAutoencoder::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("cannot open encoder model: " + path);
    return load(in);
}

SeriesAutoencoder train_autoencoder(const std::vector<std::vector<double>>& pool,
                                    const EncoderConfig& config, TrainingReport* report) {
    config.validate();
    if (pool.empty()) throw InsufficientDataError("autoencoder training pool is empty");
    for (const auto& window : pool)
        if (static_cast<int>(window.size()) != kWindowSlots)
            throw DimensionError("autoencoder training windows must have " +
                                 std::to_string(kWindowSlots) + " values");

    SeriesAutoencoder ae;
    ae.config = config;
    ae.net.layers = {nn::Dense(kWindowSlots, kAutoencoderHidden, nn::Activation::relu),
                     nn::Dense(kAutoencoderHidden, config.units, config.activation),
                     nn::Dense(config.units, kAutoencoderHidden, nn::Activation::relu),
                     nn::Dense(kAutoencoderHidden, kWindowSlots, nn::Activation::identity)};

    Rng rng(config.seed);
    ae.net.init(rng);
    IndexSplit split = split_703010(pool.size(), rng);

    auto blocks = ae.net.param_blocks();
    nn::Adam adam(config.learning_rate);

    auto mean_loss = [&](const std::vector<std::size_t>& idx) {
        if (idx.empty()) return 0.0;
        double total = 0.0;
        for (const std::size_t i : idx) total += nn::mse(ae.net.forward(pool[i]), pool[i]);
        return total / static_cast<double>(idx.size());
    };

    if (report != nullptr) {
        *report = TrainingReport{};
        report->n_train = static_cast<int>(split.train.size());
        report->n_val = static_cast<int>(split.val.size());
        report->n_test = static_cast<int>(split.test.size());
    }

    nn::Mlp::Trace trace;
    std::vector<double> grad_out;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(split.train);
        double epoch_total = 0.0;
        for (std::size_t start = 0; start < split.train.size(); start += kBatchSize) {
            const std::size_t stop = std::min(split.train.size(), start + kBatchSize);
            const double batch_n = static_cast<double>(stop - start);
            nn::zero_grads(blocks);
            for (std::size_t b = start; b < stop; ++b) {
                const std::size_t i = split.train[b];
                const std::vector<double>& out = ae.net.forward_trace(pool[i], trace);
                epoch_total += nn::mse(out, pool[i], &grad_out);
                for (auto& g : grad_out) g /= batch_n;
                ae.net.backward(pool[i], trace, grad_out, nullptr);
            }
            adam.step(blocks);
        }
        if (report != nullptr) {
            report->train_loss.push_back(epoch_total /
                                         static_cast<double>(split.train.size()));
            report->val_loss.push_back(mean_loss(split.val));
        }
    }
    if (report != nullptr) report->test_loss = mean_loss(split.test);
    return ae;
}

void write_encoded_csv(std::ostream& out, const std::vector<EncodedVector>& vectors) {
    std::vector<std::string> header = {"incident_id", "source", "units", "activation"};
    for (int i = 1; i <= kMaxUnits; ++i) header.push_back("v" + std::to_string(i));
    csv::write_row(out, header);
    for (const auto& vec : vectors) {
        if (static_cast<int>(vec.values.size()) != vec.units)
            throw DimensionError("encoded vector length does not match its unit count");
        std::vector<std::string> row = {vec.incident_id, to_string(vec.source),
                                        std::to_string(vec.units),
                                        nn::to_string(vec.activation)};
        for (double v : vec.values) row.push_back(csv::format_double(v));
        row.resize(4 + kMaxUnits);
        csv::write_row(out, row);
    }
}

std::vector<EncodedVector> read_encoded_csv(std::istream& in) {
    const csv::Table table = csv::read_csv(in);
    if (table.header.size() != 4 + static_cast<std::size_t>(kMaxUnits))
        throw SchemaError("encoded cache has wrong column count");
    std::vector<EncodedVector> vectors;
    vectors.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw SchemaError("encoded cache row has wrong field count");
        EncodedVector vec;
        vec.incident_id = row[0];
        vec.source = source_from_string(row[1]);
        vec.units = static_cast<int>(csv::parse_double(row[2]));
        vec.activation = nn::activation_from_string(row[3]);
        if (std::find(kUnitGrid.begin(), kUnitGrid.end(), vec.units) == kUnitGrid.end())
            throw SchemaError("encoded cache row has units outside the grid");
        vec.values.reserve(static_cast<std::size_t>(vec.units));
        for (int i = 0; i < kMaxUnits; ++i) {
            const std::string& cell = row[static_cast<std::size_t>(4 + i)];
            if (i < vec.units) {
                if (cell.empty()) throw SchemaError("encoded cache row is missing a value");
                vec.values.push_back(csv::parse_double(cell));
            } else if (!cell.empty()) {
                throw SchemaError("encoded cache row has values beyond its unit count");
            }
        }
        vectors.push_back(std::move(vec));
    }
    return vectors;
}

std::vector<EncodedVector> read_encoded_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("cannot open encoded cache: " + path);
    return read_encoded_csv(in);
}

}  // namespace tidp

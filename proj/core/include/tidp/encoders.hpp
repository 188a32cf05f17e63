#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tidp/feature_source.hpp"
#include "tidp/ingest.hpp"
#include "tidp/match.hpp"
#include "tidp/matrix.hpp"
#include "tidp/nn/layers.hpp"

namespace tidp {

inline constexpr int kTextSteps = 200;
inline constexpr int kTextBits = 7;
inline constexpr int kLstmHidden = 80;
inline constexpr int kAutoencoderHidden = 64;
inline constexpr int kSeverityClasses = 5;  // severity 1..4 occupies slots 1..4
inline constexpr int kBatchSize = 32;
inline constexpr int kMaxUnits = 16;
inline constexpr int kMinSentimentRecords = 50;

extern const std::array<int, 5> kUnitGrid;
extern const std::array<nn::Activation, 4> kActivationGrid;

enum class SentimentHead { mse, cross_entropy };
SentimentHead head_from_string(std::string_view name);
const char* to_string(SentimentHead head);

struct EncoderConfig {
    int units = 8;
    nn::Activation activation = nn::Activation::relu;
    SentimentHead head = SentimentHead::mse;  // sentiment encoder only
    int epochs = 15;
    std::uint64_t seed = 1;
    // Both encoders train with Adam at this rate.
    double learning_rate = 0.01;

    /// Throws ConfigError unless units and activation come from the grid sets
    /// and epochs >= 1.
    void validate() const;
};

struct TrainingReport {
    std::vector<double> train_loss;  // one entry per epoch
    std::vector<double> val_loss;    // one entry per epoch
    double test_loss = 0.0;
    int n_train = 0;
    int n_val = 0;
    int n_test = 0;
};

/// Lowercases, maps characters outside 7-bit range to space, repeats the text
/// to at least kTextSteps characters, truncates to exactly kTextSteps, and
/// expands each character to its 7-bit code, least significant bit first.
/// Throws EncodingError when the text is empty or all-space after sanitizing.
Dense2D text_to_binary(std::string_view description);

/// Character-level LSTM severity model; the bottleneck activations are the
/// encoded representation of a description.
struct SentimentEncoder {
    EncoderConfig config;
    nn::Lstm lstm;         // kTextBits -> kLstmHidden
    nn::Dense bottleneck;  // kLstmHidden -> units, config activation
    nn::Dense head;        // units -> 1 (mse) or units -> kSeverityClasses (ce)

    /// Bottleneck output on the final hidden state; the head is not applied.
    std::vector<double> encode(std::string_view description) const;

    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;
    static SentimentEncoder load(std::istream& in);
    static SentimentEncoder load_file(const std::string& path);
};

/// Trains on a seeded 70:20:10 train/validation/test split for config.epochs
/// epochs, mini-batches of kBatchSize with per-epoch reshuffle. Requires at
/// least kMinSentimentRecords records.
SentimentEncoder train_sentiment_encoder(const std::vector<IncidentRecord>& records,
                                         const EncoderConfig& config,
                                         TrainingReport* report = nullptr);

/// Hourglass reconstruction net over one normalized day window:
/// 288 -> 64 relu -> units (config activation) -> 64 relu -> 288 identity.
struct SeriesAutoencoder {
    EncoderConfig config;
    NormConstants norm{1.0, 1.0};
    nn::Mlp net;  // four layers; layers 0..1 are the encoder half

    /// Bottleneck activations; the decoder half is not applied.
    std::vector<double> encode(const std::vector<double>& series) const;
    std::vector<double> reconstruct(const std::vector<double>& series) const;

    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;
    static SeriesAutoencoder load(std::istream& in);
    static SeriesAutoencoder load_file(const std::string& path);
};

/// Trains one autoencoder on the pooled windows of every channel (same split
/// and batching scheme as the sentiment encoder). Throws on an empty pool.
SeriesAutoencoder train_autoencoder(const std::vector<std::vector<double>>& pool,
                                    const EncoderConfig& config,
                                    TrainingReport* report = nullptr);

struct EncodedVector {
    std::string incident_id;
    FeatureSource source = FeatureSource::lstm_sent;
    int units = 0;
    nn::Activation activation = nn::Activation::relu;
    std::vector<double> values;  // length == units
};

/// Cache layout: incident_id,source,units,activation,v1..v16; rows with fewer
/// units leave the tail cells empty.
void write_encoded_csv(std::ostream& out, const std::vector<EncodedVector>& vectors);
std::vector<EncodedVector> read_encoded_csv(std::istream& in);
std::vector<EncodedVector> read_encoded_csv_file(const std::string& path);

}  // namespace tidp

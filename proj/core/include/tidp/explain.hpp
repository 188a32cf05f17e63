#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tidp/matrix.hpp"
#include "tidp/regressors.hpp"

namespace tidp {

/// Lowercased words, split on any non-alphanumeric byte.
std::vector<std::string> tokenize_words(std::string_view text);

/// The words themselves plus every contiguous two-word combination
/// ("lane blocked" style), in first-appearance order of the source positions.
std::vector<std::string> ngrams12(const std::vector<std::string>& words);

struct TfIdfModel {
    std::map<std::string, std::size_t> vocabulary;  // n-gram -> column
    std::vector<double> idf;                        // per column

    std::size_t vocab_size() const { return idf.size(); }
};

/// Vocabulary over all 1- and 2-grams of the corpus with smoothed idf
/// ln((1+N)/(1+df)) + 1. Requires at least two documents.
TfIdfModel tfidf_fit(const std::vector<std::string>& documents);

/// tf times idf, L2-normalized; all-zero rows stay zero. Unknown n-grams
/// contribute nothing.
std::vector<double> tfidf_transform(const TfIdfModel& model, std::string_view text);

/// Row-per-document transform of a corpus.
Dense2D tfidf_matrix(const TfIdfModel& model, const std::vector<std::string>& documents);

struct SvdModel {
    Dense2D components;  // k x n_cols, rows orthonormal
    int k = 0;
    int n_iter = 7;
    std::uint64_t seed = 0;
};

/// Randomized range finder with `n_iter` power iterations, re-orthonormalized
/// every iteration. Throws DimensionError when k exceeds either matrix
/// dimension.
SvdModel truncated_svd(const Dense2D& x, int k, int n_iter, std::uint64_t seed);

/// x times components transposed: n_rows x k.
Dense2D svd_transform(const SvdModel& model, const Dense2D& x);
std::vector<double> svd_transform_row(const SvdModel& model, const std::vector<double>& row);

struct DurationGroups {
    double lower = 0.0;  // 1/3 empirical quantile
    double upper = 0.0;  // 2/3 empirical quantile
    std::vector<int> labels;  // 0, 1, 2 per input duration

    int label_for(double duration) const {
        if (duration <= lower) return 0;
        return duration <= upper ? 1 : 2;
    }
};

/// Cuts at the 1/3 and 2/3 empirical quantiles. Requires >= 3 samples.
DurationGroups duration_tertiles(const std::vector<double>& durations);

/// One-vs-rest boosted-tree classifier: one score function per class on 0/1
/// targets, prediction by argmax (lowest class wins ties).
struct GroupClassifier {
    std::vector<int> classes;      // ascending
    std::vector<GbdtModel> models;  // parallel to classes

    std::vector<double> scores(const std::vector<double>& row) const;
    int predict(const std::vector<double>& row) const;
};

/// Throws InsufficientDataError when the corpus has a single class.
GroupClassifier fit_group_classifier(const Dense2D& reduced, const std::vector<int>& labels,
                                     const RegressorConfig& config);

struct WordImportance {
    std::string token;
    double weight = 0.0;
    int class_label = 0;
};

struct LimeConfig {
    int n_samples = 1000;
    double keep_probability = 0.5;
    double sigma = 0.75;  // kernel width over cosine distance
    double alpha = 1.0;   // ridge strength
    int top_k = 10;
    std::uint64_t seed = 1;
};

/// Perturbs the description by dropping random word subsets, scores each
/// perturbation with `class_score`, and fits a kernel-weighted ridge from
/// word/bigram presence indicators to the scores. Returns the top features
/// by absolute weight. Throws EncodingError when the description has no
/// tokens.
std::vector<WordImportance> lime_explain(
    std::string_view description, const std::function<double(const std::string&)>& class_score,
    int class_label, const LimeConfig& config);

/// `class,token,weight` rows.
void write_explanations_csv(std::ostream& out, const std::vector<WordImportance>& importances);

}  // namespace tidp

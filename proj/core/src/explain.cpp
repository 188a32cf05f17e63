#include "tidp/explain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "tidp/errors.hpp"
#include "tidp/linalg.hpp"
#include "tidp/rng.hpp"

namespace tidp {

std::vector<std::string> tokenize_words(std::string_view text) {
    std::vector<std::string> words;
    std::string current;
    for (const char ch : text) {
        const auto u = static_cast<unsigned char>(ch);
        if (std::isalnum(u)) {
            current.push_back(static_cast<char>(std::tolower(u)));
        } else if (!current.empty()) {
            words.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) words.push_back(std::move(current));
    return words;
}

std::vector<std::string> ngrams12(const std::vector<std::string>& words) {
    std::vector<std::string> grams = words;
    for (std::size_t i = 0; i + 1 < words.size(); ++i)
        grams.push_back(words[i] + " " + words[i + 1]);
    return grams;
}

TfIdfModel tfidf_fit(const std::vector<std::string>& documents) {
    if (documents.size() < 2)
        throw InsufficientDataError("tfidf_fit needs at least two documents, got " +
                                    std::to_string(documents.size()));
    std::map<std::string, std::size_t> df;
    for (const auto& doc : documents) {
        const auto grams = ngrams12(tokenize_words(doc));
        const std::set<std::string> distinct(grams.begin(), grams.end());
        for (const auto& g : distinct) ++df[g];
    }
    TfIdfModel model;
    const double n = static_cast<double>(documents.size());
    std::size_t col = 0;
    model.idf.reserve(df.size());
    for (const auto& [gram, count] : df) {  // map order: lexicographic columns
        model.vocabulary.emplace(gram, col++);
        model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    return model;
}

std::vector<double> tfidf_transform(const TfIdfModel& model, std::string_view text) {
    std::vector<double> row(model.vocab_size(), 0.0);
    for (const auto& gram : ngrams12(tokenize_words(text))) {
        const auto it = model.vocabulary.find(gram);
        if (it != model.vocabulary.end()) row[it->second] += 1.0;
    }
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        row[j] *= model.idf[j];
        norm_sq += row[j] * row[j];
    }
    if (norm_sq > 0.0) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& v : row) v *= inv;
    }
    return row;
}

Dense2D tfidf_matrix(const TfIdfModel& model, const std::vector<std::string>& documents) {
    Dense2D out = Dense2D::zeros(static_cast<int>(documents.size()),
                                 static_cast<int>(model.vocab_size()));
    for (std::size_t i = 0; i < documents.size(); ++i) {
        const auto row = tfidf_transform(model, documents[i]);
        for (std::size_t j = 0; j < row.size(); ++j)
            out.at(static_cast<int>(i), static_cast<int>(j)) = row[j];
    }
    return out;
}

SvdModel truncated_svd(const Dense2D& x, int k, int n_iter, std::uint64_t seed) {
    if (k < 1) throw ConfigError("truncated_svd: k must be positive");
    if (k > x.rows || k > x.cols)
        throw DimensionError("truncated_svd: k=" + std::to_string(k) + " exceeds a " +
                             std::to_string(x.rows) + "x" + std::to_string(x.cols) + " matrix");

    Rng rng(seed);
    Dense2D omega(x.cols, k);
    for (auto& v : omega.data) v = rng.normal();

    Dense2D q = matmul(x, omega);
    linalg::orthonormalize_columns(q);
    const Dense2D xt = transpose(x);
    for (int it = 0; it < n_iter; ++it) {
        Dense2D z = matmul(xt, q);
        linalg::orthonormalize_columns(z);
        q = matmul(x, z);
        linalg::orthonormalize_columns(q);
    }

    // Small factor: B = Q^T X is k x cols; its right singular vectors are the
    // component rows, recovered through the k x k eigenproblem of B B^T.
    const Dense2D b = matmul(transpose(q), x);
    const Dense2D bbt = matmul(b, transpose(b));
    std::vector<double> evals;
    Dense2D evecs;
    linalg::symmetric_eigen(bbt, evals, evecs);

    SvdModel model;
    model.k = k;
    model.n_iter = n_iter;
    model.seed = seed;
    model.components = Dense2D::zeros(k, x.cols);
    const double top = evals.empty() ? 0.0 : std::max(evals[0], 0.0);
    const double tol = std::sqrt(top) * 1e-12;
    for (int i = 0; i < k; ++i) {
        const double sigma = std::sqrt(std::max(evals[static_cast<std::size_t>(i)], 0.0));
        if (sigma > tol && sigma > 0.0) {
            for (int c = 0; c < x.cols; ++c) {
                double v = 0.0;
                for (int r = 0; r < k; ++r) v += evecs.at(r, i) * b.at(r, c);
                model.components.at(i, c) = v / sigma;
            }
        } else {
            // Rank-deficient tail: complete the basis with the first standard
            // axis that survives orthogonalization against earlier rows.
            for (int axis = 0; axis < x.cols; ++axis) {
                std::vector<double> cand(static_cast<std::size_t>(x.cols), 0.0);
                cand[static_cast<std::size_t>(axis)] = 1.0;
                for (int p = 0; p < i; ++p) {
                    const double proj =
                        linalg::dot(cand.data(), model.components.row(p), x.cols);
                    for (int c = 0; c < x.cols; ++c) cand[static_cast<std::size_t>(c)] -=
                        proj * model.components.at(p, c);
                }
                const double norm = std::sqrt(linalg::dot(cand.data(), cand.data(), x.cols));
                if (norm > 1e-8) {
                    for (int c = 0; c < x.cols; ++c)
                        model.components.at(i, c) = cand[static_cast<std::size_t>(c)] / norm;
                    break;
                }
            }
        }
    }
    return model;
}

Dense2D svd_transform(const SvdModel& model, const Dense2D& x) {
    return matmul(x, transpose(model.components));
}

std::vector<double> svd_transform_row(const SvdModel& model, const std::vector<double>& row) {
    if (static_cast<int>(row.size()) != model.components.cols)
        throw DimensionError("svd_transform_row: width mismatch");
    std::vector<double> out(static_cast<std::size_t>(model.k), 0.0);
    for (int i = 0; i < model.k; ++i)
        out[static_cast<std::size_t>(i)] = linalg::dot(row.data(), model.components.row(i),
                                                       model.components.cols);
    return out;
}

DurationGroups duration_tertiles(const std::vector<double>& durations) {
    if (durations.size() < 3)
        throw InsufficientDataError("duration_tertiles needs at least three samples");
    std::vector<double> sorted = durations;
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    const auto order_stat = [&](double p) {
        const auto rank = static_cast<std::size_t>(
            std::ceil(p * static_cast<double>(n)));
        return sorted[std::min(n, std::max<std::size_t>(rank, 1)) - 1];
    };
    DurationGroups groups;
    groups.lower = order_stat(1.0 / 3.0);
    groups.upper = order_stat(2.0 / 3.0);
    groups.labels.reserve(durations.size());
    for (const double d : durations) groups.labels.push_back(groups.label_for(d));
    return groups;
}

std::vector<double> GroupClassifier::scores(const std::vector<double>& row) const {
    std::vector<double> out;
    out.reserve(models.size());
    for (const auto& m : models) out.push_back(m.predict_row(row));
    return out;
}

int GroupClassifier::predict(const std::vector<double>& row) const {
    const auto s = scores(row);
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] > s[best]) best = i;
    return classes[best];
}

GroupClassifier fit_group_classifier(const Dense2D& reduced, const std::vector<int>& labels,
                                     const RegressorConfig& config) {
    if (static_cast<std::size_t>(reduced.rows) != labels.size())
        throw DimensionError("fit_group_classifier: label count does not match rows");
    std::set<int> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2)
        throw InsufficientDataError("fit_group_classifier: corpus has a single class");

    GroupClassifier classifier;
    classifier.classes.assign(distinct.begin(), distinct.end());
    for (const int cls : classifier.classes) {
        std::vector<double> target(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i)
            target[i] = labels[i] == cls ? 1.0 : 0.0;
        classifier.models.push_back(fit_gbdt_raw(reduced, target, config));
    }
    return classifier;
}

}  // namespace tidp

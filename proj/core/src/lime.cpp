#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "tidp/csv.hpp"
#include "tidp/errors.hpp"
#include "tidp/explain.hpp"
#include "tidp/linalg.hpp"
#include "tidp/rng.hpp"

namespace tidp {

std::vector<WordImportance> lime_explain(
    std::string_view description, const std::function<double(const std::string&)>& class_score,
    int class_label, const LimeConfig& config) {
    if (config.n_samples < 1 || config.sigma <= 0.0 || config.alpha < 0.0 ||
        config.keep_probability <= 0.0 || config.keep_probability >= 1.0 || config.top_k < 1)
        throw ConfigError("lime: invalid sampling configuration");

    const std::vector<std::string> words = tokenize_words(description);
    if (words.empty()) throw EncodingError("lime: description has no tokens");

    // Surrogate features: distinct words, then distinct contiguous bigrams,
    // both in first-appearance order. A bigram is present when both of its
    // words survive the mask; dropping other words cannot separate them.
    std::vector<std::string> features;
    std::map<std::string, std::size_t> word_feature;
    for (const auto& w : words) {
        if (word_feature.emplace(w, features.size()).second) features.push_back(w);
    }
    const std::size_t n_words = features.size();
    std::vector<std::pair<std::size_t, std::size_t>> bigram_parts;
    {
        std::map<std::string, std::size_t> seen;
        for (std::size_t i = 0; i + 1 < words.size(); ++i) {
            const std::string bigram = words[i] + " " + words[i + 1];
            if (seen.emplace(bigram, features.size()).second) {
                features.push_back(bigram);
                bigram_parts.emplace_back(word_feature.at(words[i]),
                                          word_feature.at(words[i + 1]));
            }
        }
    }
    const std::size_t n_feat = features.size();

    Rng rng(config.seed);
    const auto n_samples = static_cast<std::size_t>(config.n_samples);
    Dense2D presence(static_cast<int>(n_samples), static_cast<int>(n_feat));
    std::vector<double> score(n_samples, 0.0);
    std::vector<double> weight(n_samples, 0.0);
    std::vector<char> keep(n_words);
    std::string perturbed;
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (std::size_t w = 0; w < n_words; ++w)
            keep[w] = rng.uniform() < config.keep_probability ? 1 : 0;

        perturbed.clear();
        for (const auto& w : words) {
            if (!keep[word_feature.at(w)]) continue;
            if (!perturbed.empty()) perturbed.push_back(' ');
            perturbed += w;
        }

        double present = 0.0;
        for (std::size_t w = 0; w < n_words; ++w) {
            presence.at(static_cast<int>(s), static_cast<int>(w)) = keep[w];
            present += keep[w];
        }
        for (std::size_t bi = 0; bi < bigram_parts.size(); ++bi) {
            const bool both = keep[bigram_parts[bi].first] && keep[bigram_parts[bi].second];
            presence.at(static_cast<int>(s), static_cast<int>(n_words + bi)) = both ? 1.0 : 0.0;
            present += both ? 1.0 : 0.0;
        }

        // Cosine distance between the mask and the all-present vector reduces
        // to 1 - sqrt(fraction present); the empty mask sits at distance 1.
        const double d =
            present == 0.0 ? 1.0 : 1.0 - std::sqrt(present / static_cast<double>(n_feat));
        weight[s] = std::exp(-(d * d) / (config.sigma * config.sigma));
        score[s] = class_score(perturbed);
    }

    // Kernel-weighted ridge with an unpenalized intercept, solved as an
    // augmented least-squares system.
    const auto rows = n_samples + n_feat;
    Dense2D design(static_cast<int>(rows), static_cast<int>(n_feat + 1));
    std::vector<double> target(rows, 0.0);
    for (std::size_t s = 0; s < n_samples; ++s) {
        const double sw = std::sqrt(weight[s]);
        for (std::size_t j = 0; j < n_feat; ++j)
            design.at(static_cast<int>(s), static_cast<int>(j)) =
                sw * presence.at(static_cast<int>(s), static_cast<int>(j));
        design.at(static_cast<int>(s), static_cast<int>(n_feat)) = sw;
        target[s] = sw * score[s];
    }
    const double sa = std::sqrt(config.alpha);
    for (std::size_t j = 0; j < n_feat; ++j)
        design.at(static_cast<int>(n_samples + j), static_cast<int>(j)) = sa;

    std::vector<std::string> names = features;
    names.push_back("intercept");
    const std::vector<double> beta = linalg::solve_least_squares(design, target, &names);

    std::vector<WordImportance> importances;
    importances.reserve(n_feat);
    for (std::size_t j = 0; j < n_feat; ++j)
        importances.push_back(WordImportance{features[j], beta[j], class_label});
    std::stable_sort(importances.begin(), importances.end(),
                     [](const WordImportance& a, const WordImportance& b) {
                         return std::abs(a.weight) > std::abs(b.weight);
                     });
    if (importances.size() > static_cast<std::size_t>(config.top_k))
        importances.resize(static_cast<std::size_t>(config.top_k));
    return importances;
}

void write_explanations_csv(std::ostream& out, const std::vector<WordImportance>& importances) {
    csv::write_row(out, {"class", "token", "weight"});
    for (const auto& imp : importances)
        csv::write_row(out, {std::to_string(imp.class_label), imp.token,
                             csv::format_double(imp.weight)});
}

}  // namespace tidp

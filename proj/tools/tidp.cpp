#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "run_config.hpp"
#include "tidp/csv.hpp"
#include "tidp/encoders.hpp"
#include "tidp/errors.hpp"
#include "tidp/eval.hpp"
#include "tidp/explain.hpp"
#include "tidp/ingest.hpp"
#include "tidp/match.hpp"
#include "tidp/parallel.hpp"
#include "tidp/rng.hpp"
#include "tidp/svg.hpp"

namespace {

using namespace tidp;
using cli::RunConfig;

namespace fs = std::filesystem;

void ensure_dir(const std::string& path) { fs::create_directories(path); }

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MissingArtifactError("cannot open for writing: " + path);
    return out;
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

// ---------------------------------------------------------------------------
// Shared pipeline loads.

IncidentDataset load_incident_cache(const RunConfig& config) {
    auto result = parse_incident_cache_file(config.incidents_cache());
    if (!result.report.rejected.empty())
        throw SchemaError("incident cache is corrupt: row " +
                          std::to_string(result.report.rejected.front().row_number) + ": " +
                          result.report.rejected.front().reason);
    return std::move(result.dataset);
}

std::vector<StationSeries> load_station_cache(const RunConfig& config) {
    auto parsed = parse_station_readings_file(config.stations_cache());
    if (!parsed.report.rejected.empty())
        throw SchemaError("station cache is corrupt: row " +
                          std::to_string(parsed.report.rejected.front().row_number) + ": " +
                          parsed.report.rejected.front().reason);
    std::ifstream meta(config.stations_meta_cache());
    if (!meta)
        throw MissingArtifactError("station coordinate cache not found: " +
                                   config.stations_meta_cache());
    load_station_coordinates(meta, parsed.stations);
    return std::move(parsed.stations);
}

std::vector<MatchedWindows> load_matched_cache(const RunConfig& config) {
    return read_matched_csv_file(config.matched_cache());
}

/// Baseline rows for exactly the matched incidents, in matched order.
struct BaselineData {
    FeatureTable table;
    std::vector<std::string> incident_ids;
    std::vector<const IncidentRecord*> records;
};

BaselineData build_baseline(const IncidentDataset& dataset,
                            const std::vector<MatchedWindows>& matched) {
    std::map<std::string, const IncidentRecord*> by_id;
    for (const auto& rec : dataset.records) by_id.emplace(rec.id, &rec);

    BaselineData data;
    data.table.feature_names = dataset.baseline_names;
    data.table.values = Dense2D::zeros(static_cast<int>(matched.size()),
                                       static_cast<int>(dataset.baseline_names.size()));
    for (std::size_t i = 0; i < matched.size(); ++i) {
        const auto it = by_id.find(matched[i].incident_id);
        if (it == by_id.end())
            throw MissingArtifactError("matched cache names unknown incident " +
                                       matched[i].incident_id +
                                       "; re-run ingest and match together");
        const IncidentRecord* rec = it->second;
        for (std::size_t j = 0; j < rec->baseline.size(); ++j)
            data.table.values.at(static_cast<int>(i), static_cast<int>(j)) = rec->baseline[j];
        data.table.target.push_back(static_cast<double>(rec->duration_min));
        data.incident_ids.push_back(rec->id);
        data.records.push_back(rec);
    }
    return data;
}

// ---------------------------------------------------------------------------
// ingest

int cmd_ingest(const RunConfig& config, bool synth) {
    ensure_dir(config.cache_dir);
    IncidentDataset incidents;
    std::vector<StationSeries> stations;
    RejectionReport incident_report, station_report;

    if (synth) {
        SyntheticConfig sc;
        sc.n_incidents = config.synth_incidents;
        sc.n_stations = config.synth_stations;
        sc.seed = config.master_seed;
        SyntheticData data = generate_synthetic(sc);
        incidents = std::move(data.incidents);
        stations = std::move(data.stations);
        incident_report.rows_in = static_cast<std::int64_t>(incidents.records.size());
        incident_report.rows_accepted = incident_report.rows_in;
        station_report.rows_in = 0;
        for (const auto& s : stations)
            station_report.rows_in += static_cast<std::int64_t>(s.readings.size());
        station_report.rows_accepted = station_report.rows_in;
    } else {
        BaselineSchema schema{config.baseline_numeric, config.baseline_categorical};
        auto parsed_incidents = parse_incidents_file(config.incident_csv, schema);
        incidents = std::move(parsed_incidents.dataset);
        incident_report = std::move(parsed_incidents.report);

        auto parsed_stations = parse_station_readings_file(config.station_csv);
        stations = std::move(parsed_stations.stations);
        station_report = std::move(parsed_stations.report);

        std::ifstream meta(config.station_meta_csv);
        if (!meta)
            throw SchemaError("station metadata file not found: " + config.station_meta_csv);
        const auto missing = load_station_coordinates(meta, stations);
        for (const auto& id : missing)
            std::cerr << "ingest: station " << id << " has no coordinates\n";
    }

    {
        auto out = open_out(config.incidents_cache());
        write_incidents_csv(out, incidents);
    }
    {
        auto out = open_out(config.stations_cache());
        write_stations_csv(out, stations);
    }
    {
        auto out = open_out(config.stations_meta_cache());
        write_station_coordinates_csv(out, stations);
    }
    {
        auto out = open_out(config.incident_rejects());
        write_rejection_report(out, incident_report);
    }
    {
        auto out = open_out(config.station_rejects());
        write_rejection_report(out, station_report);
    }

    std::cout << "ingest: " << incidents.records.size() << " incidents ("
              << incident_report.rows_rejected() << " rejected), " << stations.size()
              << " stations (" << station_report.rows_rejected() << " rejected rows)"
              << (synth ? " [synthetic]" : "") << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// match

int cmd_match(const RunConfig& config, double radius_m) {
    const IncidentDataset incidents = load_incident_cache(config);
    const std::vector<StationSeries> stations = load_station_cache(config);
    if (stations.empty()) throw SchemaError("station cache holds no stations");

    const auto norm_override = config.norm_override();
    const MatchResult result =
        match_all(incidents, stations, radius_m, norm_override ? &*norm_override : nullptr);

    {
        auto out = open_out(config.matched_cache());
        write_matched_csv(out, result.matched);
    }
    {
        auto out = open_out(config.norm_cache());
        write_norm_constants_csv(out, result.norm);
    }
    {
        auto out = open_out(config.match_rejects());
        write_match_rejections(out, result.unmatched);
    }

    std::cout << "matched " << result.matched.size() << " of " << incidents.records.size()
              << " incidents\n";
    return 0;
}

// ---------------------------------------------------------------------------
// train-encoders

int cmd_train_encoders(const RunConfig& config, int jobs) {
    const IncidentDataset incidents = load_incident_cache(config);
    const std::vector<MatchedWindows> matched = load_matched_cache(config);
    const NormConstants norm = read_norm_constants_csv_file(config.norm_cache());
    if (matched.empty()) throw InsufficientDataError("matched cache is empty; nothing to encode");
    ensure_dir(config.encoder_dir());

    const bool want_sentiment =
        std::count(config.grid.sources.begin(), config.grid.sources.end(),
                   FeatureSource::lstm_sent) > 0;
    std::vector<FeatureSource> series_sources;
    for (const FeatureSource s : config.grid.sources)
        if (s != FeatureSource::lstm_sent) series_sources.push_back(s);

    std::map<std::string, const IncidentRecord*> by_id;
    for (const auto& rec : incidents.records) by_id.emplace(rec.id, &rec);
    for (const auto& m : matched)
        if (by_id.find(m.incident_id) == by_id.end())
            throw MissingArtifactError("matched cache names unknown incident " + m.incident_id);

    std::vector<std::vector<double>> pool;
    pool.reserve(matched.size() * kSeriesChannels);
    for (const auto& m : matched)
        for (const auto& channel : m.channels) pool.push_back(channel);

    struct Pair {
        int units;
        nn::Activation activation;
    };
    std::vector<Pair> pairs;
    for (const int u : config.grid.units)
        for (const nn::Activation a : config.grid.activations) pairs.push_back({u, a});

    struct PairResult {
        std::vector<EncodedVector> vectors;
        std::vector<std::vector<std::string>> report_rows;
    };
    std::vector<PairResult> results(pairs.size());

    const auto report_rows = [](const char* kind, const Pair& p, const TrainingReport& r) {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t e = 0; e < r.train_loss.size(); ++e) {
            rows.push_back({kind, std::to_string(p.units), to_string(p.activation),
                            std::to_string(e + 1), csv::format_double(r.train_loss[e]),
                            csv::format_double(r.val_loss[e]),
                            e + 1 == r.train_loss.size() ? csv::format_double(r.test_loss) : ""});
        }
        return rows;
    };

    parallel_for(pairs.size(), jobs, [&](std::size_t pi) {
        const Pair& p = pairs[pi];
        PairResult& res = results[pi];

        if (want_sentiment) {
            EncoderConfig ec;
            ec.units = p.units;
            ec.activation = p.activation;
            ec.head = config.sentiment_head;
            ec.epochs = config.epochs;
            ec.learning_rate = config.encoder_learning_rate;
            ec.seed = derive_seed(config.master_seed, 100 + pi);
            TrainingReport report;
            const SentimentEncoder encoder =
                train_sentiment_encoder(incidents.records, ec, &report);
            encoder.save_file(config.encoder_dir() + "/sentiment_u" + std::to_string(p.units) +
                              "_" + to_string(p.activation) + ".json");
            for (const auto& m : matched) {
                EncodedVector v;
                v.incident_id = m.incident_id;
                v.source = FeatureSource::lstm_sent;
                v.units = p.units;
                v.activation = p.activation;
                v.values = encoder.encode(by_id.at(m.incident_id)->description);
                res.vectors.push_back(std::move(v));
            }
            for (auto& row : report_rows("sentiment", p, report))
                res.report_rows.push_back(std::move(row));
        }

        if (!series_sources.empty()) {
            EncoderConfig ec;
            ec.units = p.units;
            ec.activation = p.activation;
            ec.epochs = config.epochs;
            ec.learning_rate = config.encoder_learning_rate;
            ec.seed = derive_seed(config.master_seed, 200 + pi);
            TrainingReport report;
            SeriesAutoencoder ae = train_autoencoder(pool, ec, &report);
            ae.norm = norm;
            ae.save_file(config.encoder_dir() + "/autoencoder_u" + std::to_string(p.units) +
                         "_" + to_string(p.activation) + ".json");
            for (const FeatureSource source : series_sources) {
                const int channel = channel_index(source);
                for (const auto& m : matched) {
                    EncodedVector v;
                    v.incident_id = m.incident_id;
                    v.source = source;
                    v.units = p.units;
                    v.activation = p.activation;
                    v.values = ae.encode(m.channels[static_cast<std::size_t>(channel)]);
                    res.vectors.push_back(std::move(v));
                }
            }
            for (auto& row : report_rows("autoencoder", p, report))
                res.report_rows.push_back(std::move(row));
        }
    });

    std::vector<EncodedVector> all_vectors;
    for (auto& res : results)
        for (auto& v : res.vectors) all_vectors.push_back(std::move(v));
    {
        auto out = open_out(config.encoded_cache());
        write_encoded_csv(out, all_vectors);
    }
    {
        auto out = open_out(config.encoder_report());
        csv::write_row(out, {"kind", "units", "activation", "epoch", "train_loss", "val_loss",
                             "test_loss"});
        for (const auto& res : results)
            for (const auto& row : res.report_rows) csv::write_row(out, row);
    }

    std::cout << "train-encoders: " << pairs.size() << " configs ("
              << (want_sentiment ? "sentiment + " : "") << series_sources.size()
              << " series sources), " << all_vectors.size() << " encoded vectors for "
              << matched.size() << " incidents\n";
    return 0;
}

// ---------------------------------------------------------------------------
// rank-models

RegressorConfig tune_one(const RunConfig& config, ModelKind kind, const FeatureTable& baseline,
                         const FoldPlan& plan) {
    std::vector<RegressorConfig> candidates;
    RegressorConfig base;
    base.kind = kind;
    base.seed = config.master_seed;
    switch (kind) {
        case ModelKind::dt:
            for (const int depth : config.depth_grid)
                for (const int msl : config.min_samples_leaf_grid) {
                    RegressorConfig c = base;
                    c.max_depth = depth;
                    c.min_samples_leaf = msl;
                    candidates.push_back(c);
                }
            break;
        case ModelKind::rf:
            for (const int trees : config.trees_grid)
                for (const int depth : config.depth_grid)
                    for (const int msl : config.min_samples_leaf_grid) {
                        RegressorConfig c = base;
                        c.n_trees = trees;
                        c.max_depth = depth;
                        c.min_samples_leaf = msl;
                        candidates.push_back(c);
                    }
            break;
        case ModelKind::gbdt:
            for (const int trees : config.trees_grid)
                for (const int depth : config.depth_grid)
                    for (const double lr : config.lr_grid)
                        for (const int msl : config.min_samples_leaf_grid) {
                            RegressorConfig c = base;
                            c.n_trees = trees;
                            c.max_depth = depth;
                            c.learning_rate = lr;
                            c.min_samples_leaf = msl;
                            candidates.push_back(c);
                        }
            break;
        case ModelKind::xgb:
            for (const int trees : config.trees_grid)
                for (const int depth : config.depth_grid)
                    for (const double lr : config.lr_grid)
                        for (const double lambda : config.lambda_grid) {
                            RegressorConfig c = base;
                            c.n_trees = trees;
                            c.max_depth = depth;
                            c.learning_rate = lr;
                            c.lambda = lambda;
                            candidates.push_back(c);
                        }
            break;
        case ModelKind::knn:
            for (const int k : config.k_grid) {
                RegressorConfig c = base;
                c.k = k;
                candidates.push_back(c);
            }
            break;
        case ModelKind::ols:
        case ModelKind::svr:
            candidates.push_back(base);
            break;
    }

    RegressorConfig best = candidates.front();
    double best_mape = std::numeric_limits<double>::infinity();
    for (const auto& candidate : candidates) {
        const CvResult cv = cross_validate(baseline, candidate, plan);
        if (cv.means.mape < best_mape) {
            best_mape = cv.means.mape;
            best = candidate;
        }
    }
    return best;
}

int cmd_rank_models(const RunConfig& config, bool tune) {
    const IncidentDataset incidents = load_incident_cache(config);
    const std::vector<MatchedWindows> matched = load_matched_cache(config);
    const BaselineData baseline = build_baseline(incidents, matched);
    const FoldPlan plan = make_folds(baseline.table.n_rows(), config.n_folds,
                                     derive_seed(config.master_seed, 30000));
    ensure_dir(config.output_dir);

    std::map<ModelKind, RegressorConfig> configs = config.model_configs();
    if (tune) {
        for (const ModelKind kind : kAllModelKinds)
            configs[kind] = tune_one(config, kind, baseline.table, plan);
        auto out = open_out(config.output_dir + "/tuned_params.csv");
        csv::write_row(out, {"model", "n_trees", "max_depth", "learning_rate",
                             "min_samples_leaf", "k", "lambda"});
        for (const ModelKind kind : kAllModelKinds) {
            const auto& c = configs.at(kind);
            csv::write_row(out, {to_string(kind), std::to_string(c.n_trees),
                                 std::to_string(c.max_depth), csv::format_double(c.learning_rate),
                                 std::to_string(c.min_samples_leaf), std::to_string(c.k),
                                 csv::format_double(c.lambda)});
        }
    }

    const std::vector<RankedModel> ranking = rank_baseline_models(baseline.table, configs, plan);
    {
        auto out = open_out(config.output_dir + "/model_ranking.csv");
        write_model_ranking_csv(out, ranking);
    }
    {
        std::vector<std::string> labels;
        std::vector<double> values;
        for (const auto& r : ranking) {
            labels.push_back(to_string(r.kind));
            values.push_back(r.metrics.mape);
        }
        auto out = open_out(config.output_dir + "/model_ranking.svg");
        out << svg::horizontal_bars(labels, values, "Baseline 10-fold MAPE by model");
    }
    for (std::size_t i = 0; i < ranking.size(); ++i)
        std::cout << (i + 1) << ". " << to_string(ranking[i].kind) << "  MAPE "
                  << fmt("%.2f", ranking[i].metrics.mape) << "  RMSE "
                  << fmt("%.2f", ranking[i].metrics.rmse) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// run-grid

int cmd_run_grid(const RunConfig& config, const std::string& models_flag, int jobs) {
    const IncidentDataset incidents = load_incident_cache(config);
    const std::vector<MatchedWindows> matched = load_matched_cache(config);
    const BaselineData baseline = build_baseline(incidents, matched);
    const EncodedStore store = load_encoded_store(config.encoded_cache());
    ensure_dir(config.output_dir);

    std::vector<ModelKind> models;
    if (!models_flag.empty()) {
        std::istringstream in(models_flag);
        std::string name;
        while (std::getline(in, name, ','))
            if (!name.empty()) models.push_back(model_kind_from_string(name));
        if (models.empty()) throw ConfigError("--models given but names no models");
    } else {
        const FoldPlan plan = make_folds(baseline.table.n_rows(), config.n_folds,
                                         derive_seed(config.master_seed, 30000));
        const auto ranking =
            rank_baseline_models(baseline.table, config.model_configs(), plan);
        for (std::size_t i = 0; i < ranking.size() && i < 3; ++i)
            models.push_back(ranking[i].kind);
        std::cout << "run-grid: ranked baseline models; using";
        for (const ModelKind kind : models) std::cout << " " << to_string(kind);
        std::cout << "\n";
    }

    GridRequest request;
    request.baseline = &baseline.table;
    request.incident_ids = &baseline.incident_ids;
    request.store = &store;
    request.models = models;
    request.sets = config.grid;
    request.model_configs = config.model_configs();
    request.master_seed = config.master_seed;
    request.n_folds = config.n_folds;
    request.jobs = jobs;

    const GridResult result = run_grid(request);

    {
        auto out = open_out(config.output_dir + "/outcomes.csv");
        write_outcomes_csv(out, result.outcomes);
    }
    {
        auto out = open_out(config.output_dir + "/parallel_categories.csv");
        write_parallel_categories_csv(out, result.outcomes);
    }
    {
        auto out = open_out(config.output_dir + "/grid_errors.csv");
        csv::write_row(out, {"model", "source", "units", "activation", "message"});
        for (const auto& e : result.errors)
            csv::write_row(out, {to_string(e.spec.model), to_string(e.spec.source),
                                 std::to_string(e.spec.units), to_string(e.spec.activation),
                                 e.message});
    }
    for (const ModelKind kind : models) {
        std::ostringstream report;
        write_top8_report(report, kind, result.outcomes);
        auto out = open_out(config.output_dir + "/top8_" + to_string(kind) + ".txt");
        out << report.str();
        std::cout << report.str() << "\n";
    }

    std::cout << "run-grid: " << result.outcomes.size() << " outcomes, " << result.errors.size()
              << " cell errors\n";
    for (const auto& e : result.errors)
        std::cerr << "run-grid: " << to_string(e.spec.model) << "/" << to_string(e.spec.source)
                  << "/" << e.spec.units << "/" << to_string(e.spec.activation) << ": "
                  << e.message << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// pareto

int cmd_pareto(const RunConfig& config) {
    const std::string outcomes_path = config.output_dir + "/outcomes.csv";
    std::ifstream in(outcomes_path, std::ios::binary);
    if (!in) throw MissingArtifactError("outcomes file not found: " + outcomes_path +
                                        " (run run-grid first)");
    const std::vector<ScenarioOutcome> outcomes = read_outcomes_csv(in);
    std::vector<ScenarioOutcome> scenarios;
    for (const auto& o : outcomes)
        if (!o.baseline_only) scenarios.push_back(o);
    if (scenarios.empty()) throw InsufficientDataError("outcomes file has no scenario rows");

    const std::vector<ScenarioOutcome> front = pareto_front(scenarios);
    {
        auto out = open_out(config.output_dir + "/pareto.csv");
        write_pareto_csv(out, front);
    }
    {
        std::vector<std::pair<double, double>> points;
        for (const auto& o : scenarios) points.emplace_back(o.metrics.mape, o.metrics.rmse);
        const std::vector<std::size_t> front_idx = pareto_front_indices(points);
        auto out = open_out(config.output_dir + "/outcomes_scatter.svg");
        out << svg::scatter(points, front_idx, "Scenario MAPE vs RMSE", "MAPE (%)",
                            "RMSE (min)");
    }
    std::cout << "pareto: front holds " << front.size() << " of " << scenarios.size()
              << " scenarios\n";
    return 0;
}

// ---------------------------------------------------------------------------
// random-experiment

int cmd_random_experiment(const RunConfig& config) {
    const RandomVectorResult result =
        random_vector_experiment(100, 1.0, 10.0, 10000, config.master_seed);
    ensure_dir(config.output_dir);
    {
        auto out = open_out(config.output_dir + "/random_scatter.csv");
        write_scatter_csv(out, result);
    }
    {
        auto out = open_out(config.output_dir + "/random_scatter.svg");
        out << svg::scatter(result.points, result.front, "Random-vector MAPE vs RMSE",
                            "MAPE (%)", "RMSE");
    }
    std::cout << "random-experiment: pearson " << fmt("%.4f", result.pearson) << ", front size "
              << result.front.size() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// explain

int cmd_explain(const RunConfig& config, const std::string& target, const std::string& incident,
                int klass, int samples) {
    const IncidentDataset incidents = load_incident_cache(config);
    if (incidents.records.empty()) throw InsufficientDataError("incident cache is empty");
    ensure_dir(config.output_dir);

    std::vector<std::string> corpus;
    corpus.reserve(incidents.records.size());
    for (const auto& rec : incidents.records) corpus.push_back(rec.description);

    std::vector<int> labels;
    labels.reserve(incidents.records.size());
    if (target == "severity") {
        for (const auto& rec : incidents.records) labels.push_back(rec.severity);
    } else if (target == "tertile") {
        std::vector<double> durations;
        for (const auto& rec : incidents.records)
            durations.push_back(static_cast<double>(rec.duration_min));
        labels = duration_tertiles(durations).labels;
    } else {
        throw ConfigError("--target must be severity or tertile");
    }

    const TfIdfModel tfidf = tfidf_fit(corpus);
    const Dense2D matrix = tfidf_matrix(tfidf, corpus);
    // Small corpora cannot support the full 50 components.
    const int rank = std::min({50, matrix.rows, matrix.cols});
    const SvdModel svd_model =
        truncated_svd(matrix, rank, 7, derive_seed(config.master_seed, 40000));
    const Dense2D reduced = svd_transform(svd_model, matrix);

    RegressorConfig gbdt_config;
    gbdt_config.kind = ModelKind::gbdt;
    gbdt_config.seed = derive_seed(config.master_seed, 40001);
    const GroupClassifier classifier = fit_group_classifier(reduced, labels, gbdt_config);

    const IncidentRecord* record = &incidents.records.front();
    if (!incident.empty()) {
        record = nullptr;
        for (const auto& rec : incidents.records)
            if (rec.id == incident) record = &rec;
        if (record == nullptr)
            throw MissingArtifactError("incident " + incident + " not in the cache");
    }
    const std::size_t record_index =
        static_cast<std::size_t>(record - incidents.records.data());
    const int explained_class = klass >= 0 ? klass : labels[record_index];
    const auto cls_it =
        std::find(classifier.classes.begin(), classifier.classes.end(), explained_class);
    if (cls_it == classifier.classes.end())
        throw ConfigError("class " + std::to_string(explained_class) +
                          " does not appear in the corpus labels");
    const auto cls_index =
        static_cast<std::size_t>(cls_it - classifier.classes.begin());

    const auto score = [&](const std::string& text) {
        const auto row = tfidf_transform(tfidf, text);
        const auto projected = svd_transform_row(svd_model, row);
        return classifier.scores(projected)[cls_index];
    };

    LimeConfig lime;
    lime.n_samples = samples;
    lime.seed = derive_seed(config.master_seed, 40002);
    const std::vector<WordImportance> importances =
        lime_explain(record->description, score, explained_class, lime);

    {
        auto out = open_out(config.output_dir + "/explanations.csv");
        write_explanations_csv(out, importances);
    }
    {
        std::vector<std::string> tokens;
        std::vector<double> weights;
        for (const auto& imp : importances) {
            tokens.push_back(imp.token);
            weights.push_back(imp.weight);
        }
        auto out = open_out(config.output_dir + "/explanations.svg");
        out << svg::horizontal_bars(tokens, weights,
                                    "Word importance for class " +
                                        std::to_string(explained_class) + " (" + target + ")");
    }

    std::cout << "explain: incident " << record->id << ", " << target << " class "
              << explained_class << "; top token '" << importances.front().token << "' weight "
              << fmt("%.4f", importances.front().weight) << "\n";
    return 0;
}

int dispatch(const std::function<int()>& body) {
    try {
        return body();
    } catch (const MissingArtifactError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const EncodingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InsufficientDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {  // ConfigError, DimensionError
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Incident-duration prediction pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "Config file (default: $TIDP_CONFIG or ./tidp.toml)");
    std::uint64_t seed_flag = 0;
    const auto* seed_opt = app.add_option("--seed", seed_flag, "Master seed override");
    int jobs_flag = 0;
    const auto* jobs_opt = app.add_option("--jobs", jobs_flag, "Worker thread cap");

    auto* ingest = app.add_subcommand("ingest", "Validate raw CSVs into caches");
    bool synth = false;
    ingest->add_flag("--synth", synth, "Generate the synthetic dataset instead of reading CSVs");

    auto* match = app.add_subcommand("match", "Join incidents to nearby station windows");
    double radius_flag = -1.0;
    const auto* radius_opt =
        match->add_option("--radius", radius_flag, "Match radius in meters (default 500)");

    auto* train = app.add_subcommand("train-encoders", "Train text and series encoders");

    auto* rank = app.add_subcommand("rank-models", "Rank the model zoo on baseline features");
    bool tune = false;
    rank->add_flag("--tune", tune, "Grid-search hyperparameters before ranking");

    auto* grid = app.add_subcommand("run-grid", "Evaluate the scenario grid");
    std::string models_flag;
    grid->add_option("--models", models_flag,
                     "Comma-separated model kinds (default: top 3 from ranking)");

    auto* pareto = app.add_subcommand("pareto", "Extract the Pareto front from outcomes");

    auto* random_exp =
        app.add_subcommand("random-experiment", "MAPE-vs-RMSE random-vector experiment");

    auto* explain = app.add_subcommand("explain", "Word-importance explanation for an incident");
    std::string target = "severity";
    explain->add_option("--target", target, "Label set: severity or tertile");
    std::string incident_id;
    explain->add_option("--incident", incident_id, "Incident id (default: first record)");
    int klass = -1;
    explain->add_option("--class", klass, "Class to explain (default: the record's label)");
    int samples = 1000;
    explain->add_option("--samples", samples, "Perturbation sample count");

    CLI11_PARSE(app, argc, argv);

    return dispatch([&]() -> int {
        RunConfig config = cli::resolve_run_config(config_path);
        if (seed_opt->count() > 0) config.master_seed = seed_flag;
        const int jobs = jobs_opt->count() > 0 ? std::max(1, jobs_flag) : config.jobs;

        if (ingest->parsed()) return cmd_ingest(config, synth);
        if (match->parsed())
            return cmd_match(config,
                             radius_opt->count() > 0 ? radius_flag : config.match_radius_m);
        if (train->parsed()) return cmd_train_encoders(config, jobs);
        if (rank->parsed()) return cmd_rank_models(config, tune);
        if (grid->parsed()) return cmd_run_grid(config, models_flag, jobs);
        if (pareto->parsed()) return cmd_pareto(config);
        if (random_exp->parsed()) return cmd_random_experiment(config);
        if (explain->parsed()) return cmd_explain(config, target, incident_id, klass, samples);
        return 1;
    });
}

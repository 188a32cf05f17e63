#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tidp/encoders.hpp"
#include "tidp/eval.hpp"
#include "tidp/match.hpp"

namespace tidp::cli {

/// Everything the pipeline commands read from the config file. Flags override
/// individual fields after loading; none of the defaults depend on the clock.
struct RunConfig {
    // Paths.
    std::string incident_csv = "data/incidents.csv";
    std::string station_csv = "data/stations.csv";
    std::string station_meta_csv = "data/stations_meta.csv";
    std::string cache_dir = "cache";
    std::string output_dir = "out";

    // Baseline feature schema for raw ingests (the synthetic generator and
    // cache re-reads carry their own).
    std::vector<std::string> baseline_numeric;
    std::vector<std::string> baseline_categorical;

    // "auto" or explicit "speed_max,flow_max".
    std::string normalization = "auto";
    std::optional<NormConstants> norm_override() const;

    std::uint64_t master_seed = 1;
    double match_radius_m = kMatchRadiusMeters;
    int epochs = 15;
    double encoder_learning_rate = 0.01;
    SentimentHead sentiment_head = SentimentHead::mse;
    int n_folds = 10;
    int jobs = 1;

    int synth_incidents = 400;
    int synth_stations = 8;

    GridSets grid = default_grid_sets();

    // Declared tuning grids; rank-models --tune searches them.
    std::vector<int> trees_grid = {100, 300};
    std::vector<int> depth_grid = {3, 5, 8};
    std::vector<double> lr_grid = {0.05, 0.1};
    std::vector<int> min_samples_leaf_grid = {1, 5};
    std::vector<int> k_grid = {3, 5, 9};
    std::vector<double> lambda_grid = {0.0, 1.0, 10.0};

    /// Per-kind regressor configs at library defaults, master-seeded.
    std::map<ModelKind, RegressorConfig> model_configs() const;

    // Cache and output locations.
    std::string incidents_cache() const { return cache_dir + "/incidents.csv"; }
    std::string stations_cache() const { return cache_dir + "/stations.csv"; }
    std::string stations_meta_cache() const { return cache_dir + "/stations_meta.csv"; }
    std::string incident_rejects() const { return cache_dir + "/incidents_rejected.csv"; }
    std::string station_rejects() const { return cache_dir + "/stations_rejected.csv"; }
    std::string matched_cache() const { return cache_dir + "/matched.csv"; }
    std::string norm_cache() const { return cache_dir + "/norm.csv"; }
    std::string match_rejects() const { return cache_dir + "/match_rejected.csv"; }
    std::string encoder_dir() const { return cache_dir + "/encoders"; }
    std::string encoded_cache() const { return cache_dir + "/encoded.csv"; }
    std::string encoder_report() const { return cache_dir + "/encoder_training.csv"; }
};

/// Parses `key = value` lines ('#' comments, blank lines ignored; lists are
/// comma-separated). Unknown keys throw ConfigError naming the key.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::string& path);

/// Resolution order: explicit --config path, $TIDP_CONFIG, ./tidp.toml if it
/// exists, otherwise built-in defaults.
RunConfig resolve_run_config(const std::string& flag_path);

}  // namespace tidp::cli

#include "run_config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tidp/errors.hpp"

namespace tidp::cli {

std::optional<NormConstants> RunConfig::norm_override() const {
    if (normalization == "auto") return std::nullopt;
    const auto comma = normalization.find(',');
    if (comma == std::string::npos)
        throw ConfigError("normalization must be 'auto' or 'speed_max,flow_max'");
    NormConstants norm;
    try {
        norm.speed_max = std::stod(normalization.substr(0, comma));
        norm.flow_max = std::stod(normalization.substr(comma + 1));
    } catch (const std::exception&) {
        throw ConfigError("normalization constants must be numeric");
    }
    if (norm.speed_max <= 0.0 || norm.flow_max <= 0.0)
        throw ConfigError("normalization constants must be positive");
    return norm;
}

std::map<ModelKind, RegressorConfig> RunConfig::model_configs() const {
    std::map<ModelKind, RegressorConfig> configs;
    for (const ModelKind kind : kAllModelKinds) {
        RegressorConfig config;
        config.kind = kind;
        config.seed = master_seed;
        configs.emplace(kind, config);
    }
    return configs;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string current;
    std::istringstream in(value);
    while (std::getline(in, current, ',')) {
        current = trim(current);
        if (!current.empty()) items.push_back(current);
    }
    return items;
}

int to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an unsigned integer, got '" +
                          value + "'");
    }
}

std::vector<int> to_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (const auto& item : split_list(value)) out.push_back(to_int(key, item));
    return out;
}

std::vector<double> to_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(to_double(key, item));
    return out;
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
    RunConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "incident_csv") config.incident_csv = value;
        else if (key == "station_csv") config.station_csv = value;
        else if (key == "station_meta_csv") config.station_meta_csv = value;
        else if (key == "cache_dir") config.cache_dir = value;
        else if (key == "output_dir") config.output_dir = value;
        else if (key == "baseline_numeric") config.baseline_numeric = split_list(value);
        else if (key == "baseline_categorical") config.baseline_categorical = split_list(value);
        else if (key == "normalization") config.normalization = value;
        else if (key == "master_seed") config.master_seed = to_u64(key, value);
        else if (key == "match_radius_m") config.match_radius_m = to_double(key, value);
        else if (key == "epochs") config.epochs = to_int(key, value);
        else if (key == "encoder_learning_rate") config.encoder_learning_rate = to_double(key, value);
        else if (key == "sentiment_head") config.sentiment_head = head_from_string(value);
        else if (key == "n_folds") config.n_folds = to_int(key, value);
        else if (key == "jobs") config.jobs = to_int(key, value);
        else if (key == "synth_incidents") config.synth_incidents = to_int(key, value);
        else if (key == "synth_stations") config.synth_stations = to_int(key, value);
        else if (key == "grid_sources") {
            config.grid.sources.clear();
            for (const auto& name : split_list(value))
                config.grid.sources.push_back(source_from_string(name));
        } else if (key == "grid_units") {
            config.grid.units = to_int_list(key, value);
        } else if (key == "grid_activations") {
            config.grid.activations.clear();
            for (const auto& name : split_list(value))
                config.grid.activations.push_back(nn::activation_from_string(name));
        }
        else if (key == "trees_grid") config.trees_grid = to_int_list(key, value);
        else if (key == "depth_grid") config.depth_grid = to_int_list(key, value);
        else if (key == "lr_grid") config.lr_grid = to_double_list(key, value);
        else if (key == "min_samples_leaf_grid")
            config.min_samples_leaf_grid = to_int_list(key, value);
        else if (key == "k_grid") config.k_grid = to_int_list(key, value);
        else if (key == "lambda_grid") config.lambda_grid = to_double_list(key, value);
        else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                               key + "'");
    }
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_run_config(in);
}

RunConfig resolve_run_config(const std::string& flag_path) {
    if (!flag_path.empty()) return load_run_config(flag_path);
    if (const char* env = std::getenv("TIDP_CONFIG"); env != nullptr && *env != '\0')
        return load_run_config(env);
    if (std::filesystem::exists("tidp.toml")) return load_run_config("tidp.toml");
    return RunConfig{};
}

}  // namespace tidp::cli

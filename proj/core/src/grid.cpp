#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "tidp/csv.hpp"
#include "tidp/errors.hpp"
#include "tidp/eval.hpp"
#include "tidp/parallel.hpp"

namespace tidp {

namespace {

std::string store_key(const std::string& incident_id, FeatureSource source, int units,
                      nn::Activation activation) {
    return incident_id + '\x1f' + to_string(source) + '\x1f' + std::to_string(units) + '\x1f' +
           to_string(activation);
}

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

void EncodedStore::add(EncodedVector v) {
    entries_[store_key(v.incident_id, v.source, v.units, v.activation)] = std::move(v.values);
}

const std::vector<double>* EncodedStore::find(const std::string& incident_id,
                                              FeatureSource source, int units,
                                              nn::Activation activation) const {
    const auto it = entries_.find(store_key(incident_id, source, units, activation));
    return it == entries_.end() ? nullptr : &it->second;
}

EncodedStore load_encoded_store(const std::string& path) {
    EncodedStore store;
    for (auto& v : read_encoded_csv_file(path)) store.add(std::move(v));
    return store;
}

GridSets default_grid_sets() {
    GridSets sets;
    sets.sources.assign(kAllSources.begin(), kAllSources.end());
    sets.units.assign(kUnitGrid.begin(), kUnitGrid.end());
    sets.activations.assign(kActivationGrid.begin(), kActivationGrid.end());
    return sets;
}

namespace {

struct GridJob {
    ScenarioSpec spec;
    bool baseline_only = false;
    const FoldPlan* plan = nullptr;
};

/// Baseline columns joined with one encoded vector per row. Throws
/// MissingArtifactError on the first incident without a cached vector.
FeatureTable fuse_table(const FeatureTable& baseline,
                        const std::vector<std::string>& incident_ids, const EncodedStore& store,
                        const ScenarioSpec& spec) {
    const int n = baseline.values.rows;
    const int b = baseline.values.cols;
    FeatureTable fused;
    fused.feature_names = baseline.feature_names;
    for (int u = 0; u < spec.units; ++u)
        fused.feature_names.push_back(to_string(spec.source) + "." + std::to_string(u + 1));
    fused.values = Dense2D::zeros(n, b + spec.units);
    fused.target = baseline.target;
    for (int i = 0; i < n; ++i) {
        const auto* enc = store.find(incident_ids[static_cast<std::size_t>(i)], spec.source,
                                     spec.units, spec.activation);
        if (enc == nullptr)
            throw MissingArtifactError(
                "no encoded vector for incident " + incident_ids[static_cast<std::size_t>(i)] +
                ", source " + to_string(spec.source) + ", units " + std::to_string(spec.units) +
                ", activation " + to_string(spec.activation));
        if (enc->size() != static_cast<std::size_t>(spec.units))
            throw DimensionError("encoded vector width mismatch for incident " +
                                 incident_ids[static_cast<std::size_t>(i)]);
        for (int j = 0; j < b; ++j) fused.values.at(i, j) = baseline.values.at(i, j);
        for (int u = 0; u < spec.units; ++u)
            fused.values.at(i, b + u) = (*enc)[static_cast<std::size_t>(u)];
    }
    return fused;
}

}  // namespace

GridResult run_grid(const GridRequest& request) {
    if (request.baseline == nullptr || request.incident_ids == nullptr ||
        request.store == nullptr)
        throw ConfigError("run_grid: baseline, incident_ids, and store are required");
    if (request.models.empty()) throw ConfigError("run_grid: no models given");
    if (request.incident_ids->size() != request.baseline->n_rows())
        throw DimensionError("run_grid: incident id count does not match baseline rows");
    for (const ModelKind kind : request.models)
        if (request.model_configs.find(kind) == request.model_configs.end())
            throw ConfigError(std::string("run_grid: no config for ") + to_string(kind));

    // One fold plan per model keeps every scenario of that model paired on
    // identical splits.
    std::vector<FoldPlan> plans;
    plans.reserve(request.models.size());
    for (std::size_t mi = 0; mi < request.models.size(); ++mi)
        plans.push_back(make_folds(request.baseline->n_rows(), request.n_folds,
                                   derive_seed(request.master_seed, 10000 + mi)));

    std::vector<GridJob> jobs;
    std::uint64_t cell_stream = 0;
    for (std::size_t mi = 0; mi < request.models.size(); ++mi) {
        GridJob base;
        base.spec.model = request.models[mi];
        base.spec.seed = derive_seed(request.master_seed, 20000 + mi);
        base.baseline_only = true;
        base.plan = &plans[mi];
        jobs.push_back(base);
        for (const FeatureSource source : request.sets.sources)
            for (const int units : request.sets.units)
                for (const nn::Activation activation : request.sets.activations) {
                    GridJob job;
                    job.spec.model = request.models[mi];
                    job.spec.source = source;
                    job.spec.units = units;
                    job.spec.activation = activation;
                    job.spec.seed = derive_seed(request.master_seed, cell_stream++);
                    job.plan = &plans[mi];
                    jobs.push_back(job);
                }
    }

    struct Slot {
        bool ok = false;
        ScenarioOutcome outcome;
        std::string error;
    };
    std::vector<Slot> slots(jobs.size());

    parallel_for(jobs.size(), request.jobs, [&](std::size_t i) {
        const GridJob& job = jobs[i];
        Slot& slot = slots[i];
        try {
            RegressorConfig config = request.model_configs.at(job.spec.model);
            config.kind = job.spec.model;
            config.seed = job.spec.seed;
            const FeatureTable table =
                job.baseline_only
                    ? *request.baseline
                    : fuse_table(*request.baseline, *request.incident_ids, *request.store,
                                 job.spec);
            const CvResult cv = cross_validate(table, config, *job.plan);
            slot.outcome.spec = job.spec;
            slot.outcome.baseline_only = job.baseline_only;
            slot.outcome.metrics = cv.means;
            slot.outcome.per_fold = cv.per_fold;
            slot.ok = true;
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
    });

    GridResult result;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (slots[i].ok) {
            result.outcomes.push_back(std::move(slots[i].outcome));
        } else {
            result.errors.push_back(GridCellError{jobs[i].spec, slots[i].error});
        }
    }
    return result;
}

void write_outcomes_csv(std::ostream& out, const std::vector<ScenarioOutcome>& outcomes) {
    std::size_t n_folds = 10;
    for (const auto& o : outcomes) n_folds = std::max(n_folds, o.per_fold.size());
    std::vector<std::string> header = {"model", "source", "units",
                                       "activation", "mape",  "rmse",
                                       "mae",   "smape"};
    for (std::size_t f = 1; f <= n_folds; ++f)
        header.push_back("fold" + std::to_string(f) + "_mape");
    csv::write_row(out, header);
    for (const auto& o : outcomes) {
        std::vector<std::string> row;
        row.push_back(to_string(o.spec.model));
        if (o.baseline_only) {
            row.insert(row.end(), {"", "", ""});
        } else {
            row.push_back(to_string(o.spec.source));
            row.push_back(std::to_string(o.spec.units));
            row.push_back(to_string(o.spec.activation));
        }
        row.push_back(csv::format_double(o.metrics.mape));
        row.push_back(csv::format_double(o.metrics.rmse));
        row.push_back(csv::format_double(o.metrics.mae));
        row.push_back(csv::format_double(o.metrics.smape));
        for (std::size_t f = 0; f < n_folds; ++f)
            row.push_back(f < o.per_fold.size() ? csv::format_double(o.per_fold[f].mape) : "");
        csv::write_row(out, row);
    }
}

std::vector<ScenarioOutcome> read_outcomes_csv(std::istream& in) {
    const csv::Table table = csv::read_csv(in);
    const std::vector<std::string> fixed = {"model", "source", "units", "activation",
                                            "mape",  "rmse",   "mae",   "smape"};
    if (table.header.size() < fixed.size())
        throw SchemaError("outcomes csv: too few columns");
    for (std::size_t i = 0; i < fixed.size(); ++i)
        if (table.header[i] != fixed[i])
            throw SchemaError("outcomes csv: expected column '" + fixed[i] + "', got '" +
                              table.header[i] + "'");
    std::vector<ScenarioOutcome> outcomes;
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw SchemaError("outcomes csv: ragged row");
        ScenarioOutcome o;
        o.spec.model = model_kind_from_string(row[0]);
        o.baseline_only = row[1].empty();
        if (!o.baseline_only) {
            o.spec.source = source_from_string(row[1]);
            o.spec.units = static_cast<int>(csv::parse_double(row[2]));
            o.spec.activation = nn::activation_from_string(row[3]);
        }
        o.metrics.mape = csv::parse_double(row[4]);
        o.metrics.rmse = csv::parse_double(row[5]);
        o.metrics.mae = csv::parse_double(row[6]);
        o.metrics.smape = csv::parse_double(row[7]);
        for (std::size_t f = 8; f < row.size(); ++f) {
            if (row[f].empty()) continue;
            MetricSet fold;
            fold.mape = csv::parse_double(row[f]);
            o.per_fold.push_back(fold);
        }
        outcomes.push_back(std::move(o));
    }
    return outcomes;
}

void write_top8_report(std::ostream& out, ModelKind model,
                       const std::vector<ScenarioOutcome>& outcomes) {
    const ScenarioOutcome* baseline = nullptr;
    std::vector<const ScenarioOutcome*> scenarios;
    for (const auto& o : outcomes) {
        if (o.spec.model != model) continue;
        if (o.baseline_only) {
            baseline = &o;
        } else {
            scenarios.push_back(&o);
        }
    }
    std::stable_sort(scenarios.begin(), scenarios.end(),
                     [](const ScenarioOutcome* a, const ScenarioOutcome* b) {
                         return a->metrics.mape < b->metrics.mape;
                     });
    if (scenarios.size() > 8) scenarios.resize(8);

    out << "Model: " << to_string(model) << '\n';
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s | %-5s | %-10s | %8s | %8s\n", "AdditionData",
                  "units", "activation", "MAPE", "RMSE");
    out << line;
    out << "-------------+-------+------------+----------+---------\n";
    if (baseline != nullptr) {
        std::snprintf(line, sizeof(line), "%-12s | %-5s | %-10s | %8s | %8s\n", "baseline", "",
                      "", fixed2(baseline->metrics.mape).c_str(),
                      fixed2(baseline->metrics.rmse).c_str());
        out << line;
    }
    for (const auto* o : scenarios) {
        std::snprintf(line, sizeof(line), "%-12s | %-5d | %-10s | %8s | %8s\n",
                      to_string(o->spec.source).c_str(), o->spec.units,
                      to_string(o->spec.activation), fixed2(o->metrics.mape).c_str(),
                      fixed2(o->metrics.rmse).c_str());
        out << line;
    }
}

void write_pareto_csv(std::ostream& out, const std::vector<ScenarioOutcome>& front) {
    csv::write_row(out, {"model", "source", "units", "activation", "mape", "rmse"});
    for (const auto& o : front) {
        csv::write_row(out,
                       {to_string(o.spec.model), o.baseline_only ? "" : to_string(o.spec.source),
                        o.baseline_only ? "" : std::to_string(o.spec.units),
                        o.baseline_only ? "" : to_string(o.spec.activation),
                        csv::format_double(o.metrics.mape), csv::format_double(o.metrics.rmse)});
    }
}

void write_scatter_csv(std::ostream& out, const RandomVectorResult& result) {
    std::vector<bool> on_front(result.points.size(), false);
    for (const std::size_t i : result.front) on_front[i] = true;
    csv::write_row(out, {"mape", "rmse", "on_front"});
    for (std::size_t i = 0; i < result.points.size(); ++i)
        csv::write_row(out, {csv::format_double(result.points[i].first),
                             csv::format_double(result.points[i].second),
                             on_front[i] ? "1" : "0"});
}

void write_parallel_categories_csv(std::ostream& out,
                                   const std::vector<ScenarioOutcome>& outcomes) {
    csv::write_row(out, {"source", "units", "activation", "band"});
    for (const ModelKind kind : kAllModelKinds) {
        std::vector<std::size_t> indices;
        for (std::size_t i = 0; i < outcomes.size(); ++i)
            if (outcomes[i].spec.model == kind && !outcomes[i].baseline_only)
                indices.push_back(i);
        if (indices.empty()) continue;
        std::vector<std::size_t> order = indices;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return outcomes[a].metrics.mape < outcomes[b].metrics.mape;
        });
        std::vector<int> band(outcomes.size(), 0);
        for (std::size_t rank = 0; rank < order.size(); ++rank)
            band[order[rank]] = 1 + std::min<int>(3, static_cast<int>(4 * rank / order.size()));
        for (const std::size_t i : indices) {
            const auto& o = outcomes[i];
            csv::write_row(out, {to_string(o.spec.source), std::to_string(o.spec.units),
                                 to_string(o.spec.activation), "q" + std::to_string(band[i])});
        }
    }
}

}  // namespace tidp

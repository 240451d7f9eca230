#include "newsprop/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "newsprop/csv.hpp"
#include "newsprop/random.hpp"

namespace newsprop {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename Fn>
auto run_stage(const char* stage, double* timing_ms, Fn&& fn) {
    auto start = Clock::now();
    try {
        auto value = fn();
        if (timing_ms) *timing_ms = elapsed_ms(start);
        return value;
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

std::string format_double(double value) {
    std::ostringstream os;
    os << std::setprecision(12) << value;
    return os.str();
}

}  // namespace

PipelineOutcome run_pipeline(const Corpus& corpus, const Vocabulary& vocab, Embedding embedding,
                             const StageSettings& settings, const LabelMask& mask) {
    PipelineOutcome out;
    out.embedding = embedding;

    Eigen::MatrixXd points;
    if (embedding == Embedding::Cp) {
        SparseTensor tensor = run_stage("tensor", &out.timings.tensor_ms, [&] {
            return build_cooccurrence_tensor(corpus, vocab, settings.tensor);
        });
        out.decomposition = run_stage("decomposition", &out.timings.decomposition_ms,
                                      [&] { return cp_als(tensor, settings.cp); });
        points = out.decomposition->factors.C;
    } else {
        points = run_stage("embedding", &out.timings.embedding_ms,
                           [&] { return build_tfidf(corpus, vocab).to_dense(); });
    }

    out.graph = run_stage("graph", &out.timings.graph_ms,
                          [&] { return knn_graph(points, settings.graph); });

    out.beliefs = run_stage("propagation", &out.timings.propagation_ms,
                            [&] { return propagate(out.graph, mask.labels, settings.fabp); });
    out.classification = classify(out.beliefs);

    out.metrics = run_stage("scoring", nullptr, [&] {
        return score(out.classification.predictions, corpus, mask.held_out);
    });
    return out;
}

namespace {

// Cached stage output shared across sweep cells, carrying the standalone
// cost so each row can report what the run would have cost uncached.
template <typename T>
struct Cached {
    T value;
    double ms = 0.0;
};

// Runs mask -> propagate -> classify -> score for one already-built graph.
void finish_row(SweepRow& row, const Corpus& corpus, const KnnGraph& graph,
                const StageSettings& base, double shared_ms) {
    auto start = Clock::now();
    try {
        SplitSpec split;
        split.label_fraction = row.label_fraction;
        split.seed = rng::derive_seed(row.seed, "label-mask");
        split.stratified = base.stratified_masks;
        LabelMask mask = make_label_mask(corpus, split);

        BeliefState beliefs = propagate(graph, mask.labels, base.fabp);
        Classification classification = classify(beliefs);
        row.metrics = score(classification.predictions, corpus, mask.held_out);
        row.homophily = beliefs.homophily;
        row.ok = true;
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    row.runtime_ms = shared_ms + elapsed_ms(start);
}

void aggregate_cells(SweepResult& result) {
    using Key = std::tuple<int, int, int, int, int, double>;
    std::map<Key, std::size_t> cell_index;

    auto key_of = [](const SweepRow& row) {
        return Key{static_cast<int>(row.embedding), row.rank.value_or(-1), row.k.value_or(-1),
                   row.window.value_or(-1),
                   row.mode ? static_cast<int>(*row.mode) : -1, row.label_fraction};
    };

    std::vector<std::vector<const SweepRow*>> grouped;
    for (const SweepRow& row : result.rows) {
        Key key = key_of(row);
        auto it = cell_index.find(key);
        if (it == cell_index.end()) {
            cell_index.emplace(key, grouped.size());
            grouped.push_back({});
            it = cell_index.find(key);

            SweepCell cell;
            cell.embedding = row.embedding;
            cell.rank = row.rank;
            cell.k = row.k;
            cell.window = row.window;
            cell.mode = row.mode;
            cell.label_fraction = row.label_fraction;
            result.cells.push_back(cell);
        }
        grouped[cell_index[key]].push_back(&row);
    }

    for (std::size_t g = 0; g < grouped.size(); ++g) {
        SweepCell& cell = result.cells[g];
        cell.runs = grouped[g].size();

        std::vector<const SweepRow*> ok_rows;
        for (const SweepRow* row : grouped[g]) {
            if (row->ok) ok_rows.push_back(row);
            else ++cell.failures;
        }
        if (ok_rows.empty()) continue;

        auto mean_std = [&](auto getter, double& mean_out, double& std_out) {
            double mean = 0.0;
            for (const SweepRow* row : ok_rows) mean += getter(*row);
            mean /= static_cast<double>(ok_rows.size());
            double variance = 0.0;
            if (ok_rows.size() > 1) {
                for (const SweepRow* row : ok_rows) {
                    double d = getter(*row) - mean;
                    variance += d * d;
                }
                variance /= static_cast<double>(ok_rows.size() - 1);
            }
            mean_out = mean;
            std_out = std::sqrt(variance);
        };

        mean_std([](const SweepRow& r) { return r.metrics.accuracy; }, cell.mean.accuracy,
                 cell.stddev.accuracy);
        mean_std([](const SweepRow& r) { return r.metrics.precision; }, cell.mean.precision,
                 cell.stddev.precision);
        mean_std([](const SweepRow& r) { return r.metrics.recall; }, cell.mean.recall,
                 cell.stddev.recall);
        mean_std([](const SweepRow& r) { return r.metrics.f1; }, cell.mean.f1, cell.stddev.f1);
        double unused_std = 0.0;
        mean_std([](const SweepRow& r) { return r.homophily; }, cell.homophily_mean, unused_std);
        mean_std([](const SweepRow& r) { return r.runtime_ms; }, cell.runtime_ms_mean, unused_std);
        cell.mean.support = ok_rows.front()->metrics.support;
    }
}

}  // namespace

SweepResult sweep(const Corpus& corpus, const Vocabulary& vocab, const SweepGrid& grid,
                  const StageSettings& base) {
    grid.validate();
    SweepResult result;

    auto emit_failed = [&](Embedding emb, std::optional<int> rank, std::optional<int> k,
                           std::optional<int> window, std::optional<TensorMode> mode, double p,
                           std::uint64_t seed, const std::string& error) {
        SweepRow row;
        row.embedding = emb;
        row.rank = rank;
        row.k = k;
        row.window = window;
        row.mode = mode;
        row.label_fraction = p;
        row.seed = seed;
        row.ok = false;
        row.error = error;
        result.rows.push_back(std::move(row));
    };

    for (Embedding emb : grid.embeddings) {
        if (emb == Embedding::Cp) {
            for (int window : grid.windows) {
                for (TensorMode mode : grid.modes) {
                    Cached<SparseTensor> tensor;
                    std::string tensor_error;
                    try {
                        auto start = Clock::now();
                        TensorConfig tc = base.tensor;
                        tc.window = window;
                        tc.mode = mode;
                        tensor.value = build_cooccurrence_tensor(corpus, vocab, tc);
                        tensor.ms = elapsed_ms(start);
                    } catch (const std::exception& e) {
                        tensor_error = std::string("tensor stage: ") + e.what();
                    }

                    for (int rank : grid.ranks) {
                        for (std::uint64_t seed : grid.seeds) {
                            if (!tensor_error.empty()) {
                                for (int k : grid.ks)
                                    for (double p : grid.label_fractions)
                                        emit_failed(emb, rank, k, window, mode, p, seed,
                                                    tensor_error);
                                continue;
                            }
                            Cached<CpResult> cp;
                            std::string cp_error;
                            try {
                                auto start = Clock::now();
                                CpConfig cc = base.cp;
                                cc.rank = rank;
                                cc.seed = rng::derive_seed(seed, "cp-init");
                                cp.value = cp_als(tensor.value, cc);
                                cp.ms = elapsed_ms(start);
                            } catch (const std::exception& e) {
                                cp_error = std::string("decomposition stage: ") + e.what();
                            }

                            for (int k : grid.ks) {
                                if (!cp_error.empty()) {
                                    for (double p : grid.label_fractions)
                                        emit_failed(emb, rank, k, window, mode, p, seed, cp_error);
                                    continue;
                                }
                                Cached<KnnGraph> graph;
                                std::string graph_error;
                                try {
                                    auto start = Clock::now();
                                    GraphConfig gc = base.graph;
                                    gc.k = k;
                                    graph.value = knn_graph(cp.value.factors.C, gc);
                                    graph.ms = elapsed_ms(start);
                                } catch (const std::exception& e) {
                                    graph_error = std::string("graph stage: ") + e.what();
                                }

                                for (double p : grid.label_fractions) {
                                    if (!graph_error.empty()) {
                                        emit_failed(emb, rank, k, window, mode, p, seed,
                                                    graph_error);
                                        continue;
                                    }
                                    SweepRow row;
                                    row.embedding = emb;
                                    row.rank = rank;
                                    row.k = k;
                                    row.window = window;
                                    row.mode = mode;
                                    row.label_fraction = p;
                                    row.seed = seed;
                                    finish_row(row, corpus, graph.value, base,
                                               tensor.ms + cp.ms + graph.ms);
                                    result.rows.push_back(std::move(row));
                                }
                            }
                        }
                    }
                }
            }
        } else {
            Cached<Eigen::MatrixXd> points;
            std::string embed_error;
            try {
                auto start = Clock::now();
                points.value = build_tfidf(corpus, vocab).to_dense();
                points.ms = elapsed_ms(start);
            } catch (const std::exception& e) {
                embed_error = std::string("embedding stage: ") + e.what();
            }

            for (int k : grid.ks) {
                if (!embed_error.empty()) {
                    for (double p : grid.label_fractions)
                        for (std::uint64_t seed : grid.seeds)
                            emit_failed(emb, {}, k, {}, {}, p, seed, embed_error);
                    continue;
                }
                Cached<KnnGraph> graph;
                std::string graph_error;
                try {
                    auto start = Clock::now();
                    GraphConfig gc = base.graph;
                    gc.k = k;
                    graph.value = knn_graph(points.value, gc);
                    graph.ms = elapsed_ms(start);
                } catch (const std::exception& e) {
                    graph_error = std::string("graph stage: ") + e.what();
                }

                for (double p : grid.label_fractions) {
                    for (std::uint64_t seed : grid.seeds) {
                        if (!graph_error.empty()) {
                            emit_failed(emb, {}, k, {}, {}, p, seed, graph_error);
                            continue;
                        }
                        SweepRow row;
                        row.embedding = emb;
                        row.k = k;
                        row.label_fraction = p;
                        row.seed = seed;
                        finish_row(row, corpus, graph.value, base, points.ms + graph.ms);
                        result.rows.push_back(std::move(row));
                    }
                }
            }
        }
    }

    aggregate_cells(result);
    return result;
}

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write sweep results: " + path.string());

    out << "embedding,rank,k,window,mode,p,seed,accuracy,precision,recall,f1,h,runtime_ms,error\n";
    for (const SweepRow& row : result.rows) {
        std::vector<std::string> fields;
        fields.push_back(to_string(row.embedding));
        fields.push_back(row.rank ? std::to_string(*row.rank) : "");
        fields.push_back(row.k ? std::to_string(*row.k) : "");
        fields.push_back(row.window ? std::to_string(*row.window) : "");
        fields.push_back(row.mode ? to_string(*row.mode) : "");
        fields.push_back(format_double(row.label_fraction));
        fields.push_back(std::to_string(row.seed));
        if (row.ok) {
            fields.push_back(format_double(row.metrics.accuracy));
            fields.push_back(format_double(row.metrics.precision));
            fields.push_back(format_double(row.metrics.recall));
            fields.push_back(format_double(row.metrics.f1));
            fields.push_back(format_double(row.homophily));
            fields.push_back(format_double(row.runtime_ms));
            fields.push_back("");
        } else {
            for (int blank = 0; blank < 5; ++blank) fields.push_back("");
            fields.push_back(format_double(row.runtime_ms));
            fields.push_back(row.error);
        }
        out << csv::format_row(fields) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_sweep_summary_json(const SweepResult& result, const std::filesystem::path& path) {
    nlohmann::json cells = nlohmann::json::array();
    for (const SweepCell& cell : result.cells) {
        nlohmann::json entry;
        entry["embedding"] = to_string(cell.embedding);
        entry["rank"] = cell.rank ? nlohmann::json(*cell.rank) : nlohmann::json();
        entry["k"] = cell.k ? nlohmann::json(*cell.k) : nlohmann::json();
        entry["window"] = cell.window ? nlohmann::json(*cell.window) : nlohmann::json();
        entry["mode"] = cell.mode ? nlohmann::json(to_string(*cell.mode)) : nlohmann::json();
        entry["p"] = cell.label_fraction;
        entry["runs"] = cell.runs;
        entry["failures"] = cell.failures;
        entry["accuracy"] = {{"mean", cell.mean.accuracy}, {"stddev", cell.stddev.accuracy}};
        entry["precision"] = {{"mean", cell.mean.precision}, {"stddev", cell.stddev.precision}};
        entry["recall"] = {{"mean", cell.mean.recall}, {"stddev", cell.stddev.recall}};
        entry["f1"] = {{"mean", cell.mean.f1}, {"stddev", cell.stddev.f1}};
        entry["h_mean"] = cell.homophily_mean;
        entry["runtime_ms_mean"] = cell.runtime_ms_mean;
        cells.push_back(std::move(entry));
    }
    nlohmann::json doc;
    doc["cells"] = std::move(cells);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write sweep summary: " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace newsprop

#include "newsprop/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "newsprop/csv.hpp"
#include "newsprop/random.hpp"

namespace newsprop {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// ---- config parsing ---------------------------------------------------

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& context) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) throw std::runtime_error("unknown config key \"" + context + key + "\"");
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key) || obj[key].is_null()) return fallback;
    try {
        return obj[key].get<T>();
    } catch (const json::exception&) {
        throw std::runtime_error(std::string("config key \"") + key + "\" has the wrong type");
    }
}

RunConfig parse_run_config(const json& doc) {
    check_keys(doc,
               {"corpus", "preprocess", "balance", "embedding", "tensor", "cp", "graph", "fabp",
                "split", "labels_file", "seed", "output_dir"},
               "");
    RunConfig cfg;

    if (!doc.contains("corpus") || !doc["corpus"].is_object()) {
        throw std::runtime_error("config requires a \"corpus\" object");
    }
    const json& corpus = doc["corpus"];
    check_keys(corpus, {"path", "format"}, "corpus.");
    if (!corpus.contains("path") || !corpus["path"].is_string()) {
        throw std::runtime_error("config requires corpus.path");
    }
    cfg.corpus_path = corpus["path"].get<std::string>();
    cfg.corpus_format = parse_corpus_format(get_or<std::string>(corpus, "format", "auto"));

    if (doc.contains("preprocess")) {
        const json& pre = doc["preprocess"];
        check_keys(pre, {"stem", "stopwords", "max_vocab"}, "preprocess.");
        cfg.stem = get_or<bool>(pre, "stem", true);
        if (pre.contains("stopwords") && !pre["stopwords"].is_null()) {
            cfg.stopword_path = std::filesystem::path(pre["stopwords"].get<std::string>());
        }
        long long max_vocab = get_or<long long>(pre, "max_vocab", 5000);
        if (max_vocab < 0) throw std::runtime_error("preprocess.max_vocab must be >= 0");
        cfg.max_vocab = static_cast<std::size_t>(max_vocab);
    }

    cfg.balance = get_or<bool>(doc, "balance", false);
    cfg.embedding = parse_embedding(get_or<std::string>(doc, "embedding", "cp"));

    if (doc.contains("tensor")) {
        const json& tensor = doc["tensor"];
        check_keys(tensor, {"window", "mode"}, "tensor.");
        cfg.stages.tensor.window = get_or<int>(tensor, "window", 5);
        cfg.stages.tensor.mode = parse_tensor_mode(get_or<std::string>(tensor, "mode", "binary"));
    }
    if (doc.contains("cp")) {
        const json& cp = doc["cp"];
        check_keys(cp, {"rank", "max_iters", "tol"}, "cp.");
        cfg.stages.cp.rank = get_or<int>(cp, "rank", 10);
        cfg.stages.cp.max_iters = get_or<int>(cp, "max_iters", 100);
        cfg.stages.cp.tol = get_or<double>(cp, "tol", 1e-6);
    }
    if (doc.contains("graph")) {
        const json& graph = doc["graph"];
        check_keys(graph, {"k", "backend", "normalize_rows"}, "graph.");
        cfg.stages.graph.k = get_or<int>(graph, "k", 10);
        cfg.stages.graph.backend =
            parse_knn_backend(get_or<std::string>(graph, "backend", "kd-tree"));
        cfg.stages.graph.normalize_rows = get_or<bool>(graph, "normalize_rows", false);
    }
    if (doc.contains("fabp")) {
        const json& fabp = doc["fabp"];
        check_keys(fabp, {"homophily", "prior_magnitude", "solver_tol", "max_solver_iters"},
                   "fabp.");
        if (fabp.contains("homophily") && !fabp["homophily"].is_null()) {
            if (fabp["homophily"].is_string()) {
                if (fabp["homophily"].get<std::string>() != "auto") {
                    throw std::runtime_error("fabp.homophily must be \"auto\" or a number");
                }
            } else {
                cfg.stages.fabp.homophily = fabp["homophily"].get<double>();
            }
        }
        cfg.stages.fabp.prior_magnitude = get_or<double>(fabp, "prior_magnitude", 0.5);
        cfg.stages.fabp.solver_tol = get_or<double>(fabp, "solver_tol", 1e-8);
        cfg.stages.fabp.max_solver_iters = get_or<int>(fabp, "max_solver_iters", 1000);
    }

    if (doc.contains("labels_file") && !doc["labels_file"].is_null()) {
        if (doc.contains("split")) {
            throw std::runtime_error("config cannot have both \"split\" and \"labels_file\"");
        }
        cfg.labels_file = std::filesystem::path(doc["labels_file"].get<std::string>());
    } else if (doc.contains("split")) {
        const json& split = doc["split"];
        check_keys(split, {"p", "stratified"}, "split.");
        cfg.split.label_fraction = get_or<double>(split, "p", 0.3);
        cfg.split.stratified = get_or<bool>(split, "stratified", true);
    }
    cfg.stages.stratified_masks = cfg.split.stratified;

    cfg.seed = get_or<std::uint64_t>(doc, "seed", 42);
    cfg.output_dir = std::filesystem::path(get_or<std::string>(doc, "output_dir", "out"));
    return cfg;
}

void validate_run_config(const RunConfig& cfg) {
    cfg.stages.tensor.validate();
    cfg.stages.cp.validate();
    cfg.stages.fabp.validate();
    if (cfg.stages.graph.k < 1) throw std::runtime_error("graph.k must be at least 1");
    if (!cfg.labels_file) cfg.split.validate();
}

// ---- loading + mask helpers --------------------------------------------

template <typename Fn>
auto run_named_stage(const char* stage, double* timing_ms, Fn&& fn) {
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

LabelMask mask_from_labels_file(const Corpus& corpus, const std::filesystem::path& path) {
    csv::Table table = csv::read_file(path);
    if (table.header.size() < 2 || table.header[0] != "id" || table.header[1] != "label") {
        throw std::runtime_error(path.string() + ": expected CSV header id,label");
    }
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < corpus.articles.size(); ++i) by_id[corpus.articles[i].id] = i;

    LabelMask mask;
    mask.labels.entries.assign(corpus.size(), 0);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        auto it = by_id.find(row[0]);
        if (it == by_id.end()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(r + 2) +
                                     ": revealed label for unknown article id \"" + row[0] + "\"");
        }
        Label label = parse_label(row[1]);
        if (label == Label::Unknown) {
            throw std::runtime_error(path.string() + ":" + std::to_string(r + 2) +
                                     ": revealed labels must be real or fake");
        }
        if (mask.labels.entries[it->second] != 0) {
            throw std::runtime_error(path.string() + ":" + std::to_string(r + 2) +
                                     ": duplicate revealed label for \"" + row[0] + "\"");
        }
        mask.labels.entries[it->second] = label == Label::Fake ? -1 : 1;
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        // Only articles with known truth can be scored; unlabeled ones still
        // receive predictions but stay out of the metrics.
        if (mask.labels.entries[i] == 0 && corpus.articles[i].label != Label::Unknown) {
            mask.held_out.push_back(i);
        }
    }
    mask.labels.validate(corpus.size());
    return mask;
}

struct LoadedCorpus {
    Corpus corpus;
    Vocabulary vocab;
    double load_ms = 0.0;
    double preprocess_ms = 0.0;
    double vocabulary_ms = 0.0;
    std::unordered_set<std::string> stopwords;  // storage when a file is used
};

LoadedCorpus load_and_prepare(const RunConfig& cfg) {
    LoadedCorpus out;
    out.corpus = run_named_stage("load", &out.load_ms,
                                 [&] { return load_corpus(cfg.corpus_path, cfg.corpus_format); });

    run_named_stage("preprocess", &out.preprocess_ms, [&] {
        PreprocessOptions options;
        options.use_stemmer = cfg.stem;
        if (cfg.stopword_path) {
            out.stopwords = load_stopwords(*cfg.stopword_path);
            options.stopwords = &out.stopwords;
        }
        preprocess_corpus(out.corpus, options);
        return 0;
    });

    if (cfg.balance) {
        out.corpus = run_named_stage("balance", nullptr, [&] {
            return downsample_balance(out.corpus, rng::derive_seed(cfg.seed, "balance"));
        });
    }

    out.vocab = run_named_stage("vocabulary", &out.vocabulary_ms,
                                [&] { return build_vocabulary(out.corpus, cfg.max_vocab); });
    return out;
}

// ---- manifest + artifacts ------------------------------------------------

json metrics_to_json(const MetricReport& m) {
    return json{{"accuracy", m.accuracy},
                {"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1},
                {"support", m.support},
                {"precision_defined", m.precision_defined},
                {"recall_defined", m.recall_defined},
                {"f1_defined", m.f1_defined},
                {"confusion",
                 {{"tp", m.confusion.tp},
                  {"fp", m.confusion.fp},
                  {"tn", m.confusion.tn},
                  {"fn", m.confusion.fn}}}};
}

json config_to_json(const RunConfig& cfg) {
    json doc;
    doc["corpus"] = {{"path", cfg.corpus_path.string()},
                     {"format", cfg.corpus_format == CorpusFormat::Auto      ? "auto"
                                : cfg.corpus_format == CorpusFormat::Jsonl   ? "jsonl"
                                : cfg.corpus_format == CorpusFormat::Csv     ? "csv"
                                                                             : "directory"}};
    doc["preprocess"] = {
        {"stem", cfg.stem},
        {"stopwords", cfg.stopword_path ? json(cfg.stopword_path->string()) : json("bundled")},
        {"max_vocab", cfg.max_vocab}};
    doc["balance"] = cfg.balance;
    doc["embedding"] = to_string(cfg.embedding);
    doc["tensor"] = {{"window", cfg.stages.tensor.window},
                     {"mode", to_string(cfg.stages.tensor.mode)}};
    doc["cp"] = {{"rank", cfg.stages.cp.rank},
                 {"max_iters", cfg.stages.cp.max_iters},
                 {"tol", cfg.stages.cp.tol}};
    doc["graph"] = {{"k", cfg.stages.graph.k},
                    {"backend", to_string(cfg.stages.graph.backend)},
                    {"normalize_rows", cfg.stages.graph.normalize_rows}};
    doc["fabp"] = {{"homophily", cfg.stages.fabp.homophily ? json(*cfg.stages.fabp.homophily)
                                                           : json("auto")},
                   {"prior_magnitude", cfg.stages.fabp.prior_magnitude},
                   {"solver_tol", cfg.stages.fabp.solver_tol},
                   {"max_solver_iters", cfg.stages.fabp.max_solver_iters}};
    if (cfg.labels_file) {
        doc["labels_file"] = cfg.labels_file->string();
    } else {
        doc["split"] = {{"p", cfg.split.label_fraction}, {"stratified", cfg.split.stratified}};
    }
    doc["seed"] = cfg.seed;
    doc["output_dir"] = cfg.output_dir.string();
    return doc;
}

void write_json_file(const json& doc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_error_record(const std::filesystem::path& dir, const std::string& stage,
                        const std::string& message) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) return;  // can't record; the stderr message already carries it
    json doc{{"stage", stage}, {"message", message}};
    try {
        write_json_file(doc, dir / "error.json");
    } catch (const std::exception&) {
        // Reporting must not mask the original failure.
    }
}

void write_predictions_csv(const Corpus& corpus, const Classification& classification,
                           const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "id,prediction\n";
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        out << csv::format_row({corpus.articles[i].id,
                                to_string(classification.predictions[i])})
            << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_metrics_csv(const MetricReport& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    std::ostringstream row;
    row << std::setprecision(12) << m.accuracy << "," << m.precision << "," << m.recall << ","
        << m.f1 << "," << m.support << "," << m.confusion.tp << "," << m.confusion.fp << ","
        << m.confusion.tn << "," << m.confusion.fn << "," << (m.precision_defined ? 1 : 0) << ","
        << (m.recall_defined ? 1 : 0) << "," << (m.f1_defined ? 1 : 0);
    out << "accuracy,precision,recall,f1,support,tp,fp,tn,fn,"
           "precision_defined,recall_defined,f1_defined\n"
        << row.str() << "\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// ---- subcommands ---------------------------------------------------------

int run_command(const RunConfig& cfg) {
    std::string failed_stage = "setup";
    try {
        LoadedCorpus prepared = load_and_prepare(cfg);

        LabelMask mask = run_named_stage("split", nullptr, [&]() -> LabelMask {
            if (cfg.labels_file) return mask_from_labels_file(prepared.corpus, *cfg.labels_file);
            SplitSpec split = cfg.split;
            split.seed = rng::derive_seed(cfg.seed, "label-mask");
            return make_label_mask(prepared.corpus, split);
        });

        StageSettings stages = cfg.stages;
        stages.cp.seed = rng::derive_seed(cfg.seed, "cp-init");
        PipelineOutcome outcome =
            run_pipeline(prepared.corpus, prepared.vocab, cfg.embedding, stages, mask);

        run_named_stage("output", nullptr, [&] {
            std::filesystem::create_directories(cfg.output_dir);

            json manifest;
            manifest["command"] = "run";
            manifest["config"] = config_to_json(cfg);
            manifest["derived_seeds"] = {
                {"cp_init", stages.cp.seed},
                {"label_mask", rng::derive_seed(cfg.seed, "label-mask")},
                {"balance", rng::derive_seed(cfg.seed, "balance")}};

            LabelCounts counts = prepared.corpus.label_counts();
            manifest["corpus"] = {{"articles", prepared.corpus.size()},
                                  {"label_counts",
                                   {{"real", counts.real},
                                    {"fake", counts.fake},
                                    {"unknown", counts.unknown}}},
                                  {"vocabulary_size", prepared.vocab.size()}};

            json artifacts;
            if (outcome.decomposition) {
                const CpResult& cp = *outcome.decomposition;
                write_factors(cp.factors, cfg.output_dir / "A.txt", cfg.output_dir / "B.txt",
                              cfg.output_dir / "C.txt", cfg.output_dir / "weights.txt");
                manifest["decomposition"] = {{"iterations", cp.iterations},
                                             {"converged", cp.converged},
                                             {"final_fit", cp.final_fit},
                                             {"ridge_applied", cp.ridge_applied}};
                artifacts["factors"] = {"A.txt", "B.txt", "C.txt", "weights.txt"};
            }

            write_edge_list(outcome.graph, cfg.output_dir / "graph.txt");
            artifacts["graph"] = "graph.txt";
            manifest["graph"] = {{"nodes", outcome.graph.node_count},
                                 {"edges", outcome.graph.edge_count()},
                                 {"max_degree", outcome.graph.max_degree()}};

            write_beliefs(outcome.beliefs, outcome.classification, cfg.output_dir / "beliefs.txt");
            artifacts["beliefs"] = "beliefs.txt";
            manifest["propagation"] = {{"homophily", outcome.beliefs.homophily},
                                       {"a", outcome.beliefs.coefficients.a},
                                       {"c_prime", outcome.beliefs.coefficients.c_prime},
                                       {"residual", outcome.beliefs.residual},
                                       {"solver_iterations", outcome.beliefs.solver_iterations},
                                       {"used_direct_solve", outcome.beliefs.used_direct_solve},
                                       {"tie_count", outcome.classification.tie_count}};

            write_predictions_csv(prepared.corpus, outcome.classification,
                                  cfg.output_dir / "predictions.csv");
            artifacts["predictions"] = "predictions.csv";

            write_metrics_csv(outcome.metrics, cfg.output_dir / "metrics.csv");
            artifacts["metrics"] = "metrics.csv";
            manifest["metrics"] = metrics_to_json(outcome.metrics);

            std::size_t revealed = 0;
            for (int v : mask.labels.entries) revealed += v != 0;
            manifest["split"] = {{"revealed", revealed}, {"held_out", mask.held_out.size()}};

            manifest["timings_ms"] = {{"load", prepared.load_ms},
                                      {"preprocess", prepared.preprocess_ms},
                                      {"vocabulary", prepared.vocabulary_ms},
                                      {"tensor", outcome.timings.tensor_ms},
                                      {"decomposition", outcome.timings.decomposition_ms},
                                      {"embedding", outcome.timings.embedding_ms},
                                      {"graph", outcome.timings.graph_ms},
                                      {"propagation", outcome.timings.propagation_ms}};
            manifest["artifacts"] = artifacts;
            write_json_file(manifest, cfg.output_dir / "manifest.json");
            return 0;
        });
        return 0;
    } catch (const StageError& e) {
        failed_stage = e.stage;
        std::cerr << "error: " << e.what() << "\n";
        write_error_record(cfg.output_dir, failed_stage, e.what());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_error_record(cfg.output_dir, failed_stage, e.what());
        return 2;
    }
}

SweepGrid parse_sweep_grid(const json& doc, const RunConfig& cfg) {
    check_keys(doc, {"embeddings", "ranks", "ks", "windows", "modes", "ps", "seeds", "seed_count"},
               "grid.");
    SweepGrid grid;
    grid.embeddings = {cfg.embedding};
    grid.ranks = {cfg.stages.cp.rank};
    grid.ks = {cfg.stages.graph.k};
    grid.windows = {cfg.stages.tensor.window};
    grid.modes = {cfg.stages.tensor.mode};
    grid.label_fractions = {cfg.split.label_fraction};

    if (doc.contains("embeddings")) {
        grid.embeddings.clear();
        for (const auto& e : doc["embeddings"]) grid.embeddings.push_back(parse_embedding(e));
    }
    if (doc.contains("ranks")) grid.ranks = doc["ranks"].get<std::vector<int>>();
    if (doc.contains("ks")) grid.ks = doc["ks"].get<std::vector<int>>();
    if (doc.contains("windows")) grid.windows = doc["windows"].get<std::vector<int>>();
    if (doc.contains("modes")) {
        grid.modes.clear();
        for (const auto& m : doc["modes"]) grid.modes.push_back(parse_tensor_mode(m));
    }
    if (doc.contains("ps")) grid.label_fractions = doc["ps"].get<std::vector<double>>();
    if (doc.contains("seeds") && doc.contains("seed_count")) {
        throw std::runtime_error("grid cannot have both \"seeds\" and \"seed_count\"");
    }
    if (doc.contains("seeds")) {
        grid.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
    } else if (doc.contains("seed_count")) {
        int n = doc["seed_count"].get<int>();
        if (n < 1) throw std::runtime_error("grid.seed_count must be at least 1");
        grid.seeds.clear();
        for (int s = 1; s <= n; ++s) grid.seeds.push_back(static_cast<std::uint64_t>(s));
    }
    grid.validate();
    return grid;
}

int sweep_command(const RunConfig& cfg, const SweepGrid& grid) {
    try {
        LoadedCorpus prepared = load_and_prepare(cfg);

        StageSettings base = cfg.stages;
        base.stratified_masks = cfg.split.stratified;
        SweepResult result = sweep(prepared.corpus, prepared.vocab, grid, base);

        std::filesystem::create_directories(cfg.output_dir);
        write_sweep_csv(result, cfg.output_dir / "results.csv");
        write_sweep_summary_json(result, cfg.output_dir / "summary.json");

        json manifest;
        manifest["command"] = "sweep";
        manifest["config"] = config_to_json(cfg);
        json grid_json;
        json embeddings = json::array();
        for (Embedding e : grid.embeddings) embeddings.push_back(to_string(e));
        grid_json["embeddings"] = embeddings;
        grid_json["ranks"] = grid.ranks;
        grid_json["ks"] = grid.ks;
        grid_json["windows"] = grid.windows;
        json modes = json::array();
        for (TensorMode m : grid.modes) modes.push_back(to_string(m));
        grid_json["modes"] = modes;
        grid_json["ps"] = grid.label_fractions;
        grid_json["seeds"] = grid.seeds;
        manifest["grid"] = grid_json;
        manifest["rows"] = result.rows.size();
        std::size_t failures = 0;
        for (const SweepRow& row : result.rows) failures += row.ok ? 0 : 1;
        manifest["failures"] = failures;
        manifest["artifacts"] = {{"results", "results.csv"}, {"summary", "summary.json"}};
        write_json_file(manifest, cfg.output_dir / "manifest.json");

        if (!result.rows.empty() && failures == result.rows.size()) {
            std::cerr << "error: every sweep cell failed; see " +
                             (cfg.output_dir / "results.csv").string()
                      << "\n";
            return 3;
        }
        return 0;
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_error_record(cfg.output_dir, e.stage, e.what());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_error_record(cfg.output_dir, "sweep", e.what());
        return 2;
    }
}

int inspect_command(const std::filesystem::path& run_dir) {
    std::filesystem::path manifest = run_dir / "manifest.json";
    if (!std::filesystem::exists(manifest)) {
        std::cerr << "error: no manifest at " << manifest.string() << "\n";
        return 1;
    }
    try {
        std::cout << read_json_file(manifest).dump(2) << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int export_graph_command(const RunConfig& cfg, const std::filesystem::path& out_path) {
    try {
        LoadedCorpus prepared = load_and_prepare(cfg);

        Eigen::MatrixXd points;
        if (cfg.embedding == Embedding::Cp) {
            SparseTensor tensor = run_named_stage("tensor", nullptr, [&] {
                return build_cooccurrence_tensor(prepared.corpus, prepared.vocab,
                                                 cfg.stages.tensor);
            });
            CpConfig cp = cfg.stages.cp;
            cp.seed = rng::derive_seed(cfg.seed, "cp-init");
            points = run_named_stage("decomposition", nullptr,
                                     [&] { return cp_als(tensor, cp).factors.C; });
        } else {
            points = run_named_stage("embedding", nullptr, [&] {
                return build_tfidf(prepared.corpus, prepared.vocab).to_dense();
            });
        }
        KnnGraph graph = run_named_stage("graph", nullptr,
                                         [&] { return knn_graph(points, cfg.stages.graph); });
        run_named_stage("output", nullptr, [&] {
            if (out_path.has_parent_path()) {
                std::filesystem::create_directories(out_path.parent_path());
            }
            write_edge_list(graph, out_path);
            return 0;
        });
        return 0;
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

struct CliOverrides {
    std::string corpus;
    std::string format;
    std::string embedding;
    std::string mode;
    std::string backend;
    std::string out;
    std::optional<int> rank, k, window, max_iters;
    std::optional<double> p, homophily, prior_magnitude;
    std::optional<std::uint64_t> seed;
    std::optional<long long> max_vocab;
    bool balance = false;

    void apply(RunConfig& cfg) const {
        if (!corpus.empty()) cfg.corpus_path = corpus;
        if (!format.empty()) cfg.corpus_format = parse_corpus_format(format);
        if (!embedding.empty()) cfg.embedding = parse_embedding(embedding);
        if (!mode.empty()) cfg.stages.tensor.mode = parse_tensor_mode(mode);
        if (!backend.empty()) cfg.stages.graph.backend = parse_knn_backend(backend);
        if (!out.empty()) cfg.output_dir = out;
        if (rank) cfg.stages.cp.rank = *rank;
        if (k) cfg.stages.graph.k = *k;
        if (window) cfg.stages.tensor.window = *window;
        if (max_iters) cfg.stages.cp.max_iters = *max_iters;
        if (p) cfg.split.label_fraction = *p;
        if (homophily) cfg.stages.fabp.homophily = *homophily;
        if (prior_magnitude) cfg.stages.fabp.prior_magnitude = *prior_magnitude;
        if (seed) cfg.seed = *seed;
        if (max_vocab) {
            if (*max_vocab < 0) throw std::runtime_error("--max-vocab must be >= 0");
            cfg.max_vocab = static_cast<std::size_t>(*max_vocab);
        }
        if (balance) cfg.balance = true;
    }
};

void add_override_flags(CLI::App* cmd, CliOverrides& overrides) {
    cmd->add_option("--corpus", overrides.corpus, "Corpus path (overrides config)");
    cmd->add_option("--format", overrides.format, "Corpus format: auto, jsonl, csv, directory");
    cmd->add_option("--embedding", overrides.embedding, "Embedding source: cp or tfidf");
    cmd->add_option("--rank", overrides.rank, "Decomposition rank R");
    cmd->add_option("--k", overrides.k, "Nearest-neighbor count");
    cmd->add_option("--window", overrides.window, "Co-occurrence window w");
    cmd->add_option("--mode", overrides.mode, "Tensor mode: frequency or binary");
    cmd->add_option("--backend", overrides.backend, "k-NN backend: brute-force or kd-tree");
    cmd->add_option("--max-iters", overrides.max_iters, "CP-ALS iteration cap");
    cmd->add_option("--p", overrides.p, "Revealed-label fraction");
    cmd->add_option("--homophily", overrides.homophily, "Homophily factor (default: auto)");
    cmd->add_option("--prior-magnitude", overrides.prior_magnitude, "Prior belief magnitude");
    cmd->add_option("--seed", overrides.seed, "Root seed");
    cmd->add_option("--max-vocab", overrides.max_vocab, "Vocabulary cap (0 = unlimited)");
    cmd->add_option("--out", overrides.out, "Output directory");
    cmd->add_flag("--balance", overrides.balance, "Down-sample the larger class first");
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    RunConfig cfg = parse_run_config(read_json_file(path));
    validate_run_config(cfg);
    return cfg;
}

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Semi-supervised article classification: co-occurrence tensor embeddings, "
                 "k-NN graphs and belief propagation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string grid_path;
    std::string inspect_dir;
    std::string export_path;
    CliOverrides run_overrides;
    CliOverrides sweep_overrides;
    CliOverrides export_overrides;

    CLI::App* run_cmd = app.add_subcommand("run", "Run one configured pipeline");
    run_cmd->add_option("--config", config_path, "JSON config file")->required();
    add_override_flags(run_cmd, run_overrides);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a parameter grid");
    sweep_cmd->add_option("--config", config_path, "JSON config file")->required();
    sweep_cmd->add_option("--grid", grid_path, "JSON grid file")->required();
    add_override_flags(sweep_cmd, sweep_overrides);

    CLI::App* inspect_cmd = app.add_subcommand("inspect", "Print a run directory's manifest");
    inspect_cmd->add_option("dir", inspect_dir, "Run directory")->required();

    CLI::App* export_cmd = app.add_subcommand("export-graph", "Write the k-NN edge list");
    export_cmd->add_option("--config", config_path, "JSON config file")->required();
    export_cmd->add_option("--graph-out", export_path, "Edge-list output file")->required();
    add_override_flags(export_cmd, export_overrides);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (inspect_cmd->parsed()) return inspect_command(inspect_dir);

        RunConfig cfg = load_run_config(config_path);
        if (run_cmd->parsed()) {
            run_overrides.apply(cfg);
            validate_run_config(cfg);
            return run_command(cfg);
        }
        if (sweep_cmd->parsed()) {
            sweep_overrides.apply(cfg);
            validate_run_config(cfg);
            SweepGrid grid = parse_sweep_grid(read_json_file(grid_path), cfg);
            return sweep_command(cfg, grid);
        }
        export_overrides.apply(cfg);
        validate_run_config(cfg);
        return export_graph_command(cfg, export_path);
    } catch (const std::exception& e) {
        // Everything reaching here is a configuration problem; stage errors
        // are handled (and exit-coded) inside the subcommands.
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace newsprop

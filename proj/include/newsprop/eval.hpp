#pragma once

// Label masking, classification metrics, parameter sweeps, and the
// sensitivity sub-sampling harness.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "newsprop/corpus.hpp"
#include "newsprop/cpd.hpp"
#include "newsprop/fabp.hpp"
#include "newsprop/graph.hpp"
#include "newsprop/tensor.hpp"

namespace newsprop {

// Banker's rounding of a non-negative value; used for revealed-label counts
// so percentages map to deterministic, unbiased integers.
long long round_half_even(double x);

// Fake articles are the positive class throughout.
struct Confusion {
    long long tp = 0;  // predicted fake, truly fake
    long long fp = 0;  // predicted fake, truly real
    long long tn = 0;  // predicted real, truly real
    long long fn = 0;  // predicted real, truly fake

    long long total() const { return tp + fp + tn + fn; }
};

struct MetricReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;  // evaluated (held-out) article count
    // Zero-denominator metrics are reported as 0 with the flag cleared.
    bool precision_defined = true;
    bool recall_defined = true;
    bool f1_defined = true;
    Confusion confusion;
};

struct SplitSpec {
    double label_fraction = 0.3;  // p, strictly between 0 and 1
    std::uint64_t seed = 0;
    bool stratified = true;

    void validate() const;
};

struct LabelMask {
    LabelVector labels;                  // revealed evidence, +-1 / 0
    std::vector<std::size_t> held_out;   // article positions left unlabeled
};

// Reveals round(p*M) labels (stratified: round(p*M_c) per class) and hides
// the rest. Requires a fully ground-truth-labeled corpus. Errors when a
// revealed count rounds to zero.
LabelMask make_label_mask(const Corpus& corpus, const SplitSpec& spec);

// Metrics over the held-out positions only. predictions[i] is the predicted
// label of corpus.articles[i]; every held-out article must have known truth.
MetricReport score(const std::vector<Label>& predictions, const Corpus& corpus,
                   const std::vector<std::size_t>& held_out);

// ---- parameter sweeps --------------------------------------------------

enum class Embedding { Cp, Tfidf };

Embedding parse_embedding(const std::string& text);
std::string to_string(Embedding embedding);

// Per-stage settings shared by every grid cell; the grid overrides window,
// mode, rank and k per cell.
struct StageSettings {
    TensorConfig tensor;
    CpConfig cp;
    GraphConfig graph;
    FabpConfig fabp;
    bool stratified_masks = true;
};

struct SweepGrid {
    std::vector<Embedding> embeddings = {Embedding::Cp};
    std::vector<int> ranks = {10};
    std::vector<int> ks = {10};
    std::vector<int> windows = {5};
    std::vector<TensorMode> modes = {TensorMode::Binary};
    std::vector<double> label_fractions = {0.3};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

    void validate() const;  // every axis nonempty
};

// One pipeline run. For tf-idf rows the tensor-specific fields are empty.
struct SweepRow {
    Embedding embedding = Embedding::Cp;
    std::optional<int> rank;
    std::optional<int> k;
    std::optional<int> window;
    std::optional<TensorMode> mode;
    double label_fraction = 0.0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;  // stage-tagged message when ok is false
    MetricReport metrics;
    double homophily = 0.0;
    double runtime_ms = 0.0;  // standalone cost of this run (caching-independent)
};

// Mean +- sample standard deviation over the seeds of one grid cell.
struct SweepCell {
    Embedding embedding = Embedding::Cp;
    std::optional<int> rank;
    std::optional<int> k;
    std::optional<int> window;
    std::optional<TensorMode> mode;
    double label_fraction = 0.0;
    std::size_t runs = 0;
    std::size_t failures = 0;
    MetricReport mean;
    MetricReport stddev;
    double homophily_mean = 0.0;
    double runtime_ms_mean = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepCell> cells;
};

// Runs every grid cell for every seed, recording per-cell failures without
// aborting. Heavy intermediates (tensor, factors, graph) are shared across
// compatible cells; runtime_ms still reports each run's standalone cost.
// Defined alongside the pipeline orchestration.
SweepResult sweep(const Corpus& corpus, const Vocabulary& vocab, const SweepGrid& grid,
                  const StageSettings& base);

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);
void write_sweep_summary_json(const SweepResult& result, const std::filesystem::path& path);

// ---- sensitivity sub-sampling -------------------------------------------

struct SensitivityFilter {
    // Keep fake articles whose category equals this tag (reals all pass and
    // are re-balanced afterwards).
    std::optional<std::string> category;
    // Absolute token-length band [lo, hi], inclusive.
    std::optional<std::pair<std::size_t, std::size_t>> length_band;
    // Alternative band [mean - delta, mean + delta], resolved against the
    // mean token length of the input corpus at call time.
    std::optional<double> length_delta;
    std::uint64_t seed = 0;  // for the balancing down-sample
};

// Filters then class-balances. Articles with unknown labels are dropped.
// Errors when either class comes out empty.
Corpus subsample_sensitivity(const Corpus& corpus, const SensitivityFilter& filter);

}  // namespace newsprop

#pragma once

// End-to-end orchestration of one classification run:
// embed (CP factors or tf-idf rows) -> k-NN graph -> belief propagation ->
// metrics. Both embedding arms share every downstream stage.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "newsprop/eval.hpp"

namespace newsprop {

// A failure inside a pipeline stage, tagged with the stage name
// (preprocess, vocabulary, tensor, decomposition, embedding, graph,
// propagation, scoring) so callers can report where a run died.
struct StageError : std::runtime_error {
    StageError(std::string stage_name, const std::string& message)
        : std::runtime_error(stage_name + " stage: " + message), stage(std::move(stage_name)) {}

    std::string stage;
};

struct StageTimings {
    double tensor_ms = 0.0;
    double decomposition_ms = 0.0;
    double embedding_ms = 0.0;  // tf-idf arm
    double graph_ms = 0.0;
    double propagation_ms = 0.0;
    double total_ms() const {
        return tensor_ms + decomposition_ms + embedding_ms + graph_ms + propagation_ms;
    }
};

struct PipelineOutcome {
    Embedding embedding = Embedding::Cp;
    // CP arm only:
    std::optional<CpResult> decomposition;
    // Always produced:
    KnnGraph graph;
    BeliefState beliefs;
    Classification classification;
    MetricReport metrics;
    StageTimings timings;
};

// Runs one configured pipeline over a preprocessed corpus. The mask supplies
// the revealed labels and the held-out evaluation set. Stage failures are
// rethrown as StageError.
PipelineOutcome run_pipeline(const Corpus& corpus, const Vocabulary& vocab, Embedding embedding,
                             const StageSettings& settings, const LabelMask& mask);

}  // namespace newsprop

#pragma once

// Command-line orchestration: run / sweep / inspect / export-graph.
// Declarative JSON config with flag overrides; every run writes a manifest
// that records all resolved settings.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "newsprop/eval.hpp"
#include "newsprop/pipeline.hpp"

namespace newsprop {

struct RunConfig {
    std::filesystem::path corpus_path;
    CorpusFormat corpus_format = CorpusFormat::Auto;

    bool stem = true;
    std::optional<std::filesystem::path> stopword_path;  // empty = bundled list
    std::size_t max_vocab = 5000;
    bool balance = false;  // down-sample the larger class before the pipeline

    Embedding embedding = Embedding::Cp;
    StageSettings stages;

    // Either a fraction split or an explicit revealed-labels file.
    SplitSpec split;
    std::optional<std::filesystem::path> labels_file;

    std::uint64_t seed = 42;
    std::filesystem::path output_dir = "out";
};

// Parses and validates a config file, applying defaults; throws
// std::runtime_error (reported as a config error, exit 1) on unknown keys,
// bad types or out-of-range values.
RunConfig load_run_config(const std::filesystem::path& path);

// Exit codes: 0 success, 1 config error, 2 stage error, 3 every sweep cell
// failed. Testable entry point behind main().
int cli_main(int argc, const char* const* argv);

}  // namespace newsprop

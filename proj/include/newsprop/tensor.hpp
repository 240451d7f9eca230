#pragma once

// Word-word-article co-occurrence tensors (frequency or binary) and the
// tf-idf matrix used by the baseline embedding.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "newsprop/corpus.hpp"

namespace newsprop {

enum class TensorMode { Frequency, Binary };

TensorMode parse_tensor_mode(const std::string& text);
std::string to_string(TensorMode mode);

struct TensorConfig {
    int window = 5;  // positions p < q co-occur when q - p < window
    TensorMode mode = TensorMode::Binary;

    void validate() const;  // window must lie in [2, 50]
};

struct TensorEntry {
    int i = 0;  // word index, first mode
    int j = 0;  // word index, second mode
    int k = 0;  // article index, third mode
    double value = 0.0;
};

// Three-mode coordinate-format tensor, dims (I, I, M), entries sorted by
// (k, i, j) with unique coordinates and non-negative finite values. The
// co-occurrence builder additionally guarantees symmetric slices with no
// diagonal; validate_cooccurrence checks those builder-level invariants.
struct SparseTensor {
    int word_dim = 0;     // I
    int article_dim = 0;  // M
    std::vector<TensorEntry> entries;

    std::size_t nnz() const { return entries.size(); }
    double frobenius_norm() const;

    // Container invariants: dims positive, indices in range, values finite
    // and non-negative, entries strictly sorted by (k, i, j).
    void validate() const;
};

// Slice symmetry ((i,j,k) stored iff (j,i,k) stored with equal value) and
// absence of diagonal entries.
void validate_cooccurrence(const SparseTensor& tensor);

// X(i,j,k) = number of position pairs p < q with q - p < window whose tokens
// map to vocabulary words {i, j}, i != j; stored in both orientations.
// Binary mode stores 1 wherever the frequency count would be positive.
// Out-of-vocabulary tokens occupy positions but produce no entries.
SparseTensor build_cooccurrence_tensor(const Corpus& corpus, const Vocabulary& vocab,
                                       const TensorConfig& config);

// Text coordinate format: header "I I M", then one "i j k value" line per
// entry (0-based, sorted by (k, i, j)).
void write_tensor(const SparseTensor& tensor, const std::filesystem::path& path);
SparseTensor read_tensor(const std::filesystem::path& path);

struct TfidfMatrix {
    int article_dim = 0;  // M (rows)
    int word_dim = 0;     // I (columns)
    // Per article: (word index, weight), sorted by word index, weights > 0.
    std::vector<std::vector<std::pair<int, double>>> rows;

    Eigen::MatrixXd to_dense() const;
};

// weight(k, i) = tf(i, k) * ln(M / df(i)); words appearing in every article
// get weight 0 (omitted from the sparse rows).
TfidfMatrix build_tfidf(const Corpus& corpus, const Vocabulary& vocab);

}  // namespace newsprop

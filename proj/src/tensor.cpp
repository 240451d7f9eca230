#include "newsprop/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <stdexcept>
#include <tuple>

namespace newsprop {
namespace {

bool entry_order(const TensorEntry& a, const TensorEntry& b) {
    if (a.k != b.k) return a.k < b.k;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
}

}  // namespace

TensorMode parse_tensor_mode(const std::string& text) {
    if (text == "frequency") return TensorMode::Frequency;
    if (text == "binary") return TensorMode::Binary;
    throw std::runtime_error("unknown tensor mode \"" + text + "\" (expected frequency or binary)");
}

std::string to_string(TensorMode mode) {
    return mode == TensorMode::Frequency ? "frequency" : "binary";
}

void TensorConfig::validate() const {
    if (window < 2 || window > 50) {
        throw std::invalid_argument("co-occurrence window must lie in [2, 50], got " +
                                    std::to_string(window));
    }
}

double SparseTensor::frobenius_norm() const {
    double sum = 0.0;
    for (const TensorEntry& e : entries) sum += e.value * e.value;
    return std::sqrt(sum);
}

void SparseTensor::validate() const {
    if (word_dim <= 0 || article_dim <= 0) {
        throw std::runtime_error("tensor dims must be positive");
    }
    const TensorEntry* prev = nullptr;
    for (const TensorEntry& e : entries) {
        if (e.i < 0 || e.i >= word_dim || e.j < 0 || e.j >= word_dim || e.k < 0 ||
            e.k >= article_dim) {
            throw std::runtime_error("tensor entry (" + std::to_string(e.i) + "," +
                                     std::to_string(e.j) + "," + std::to_string(e.k) +
                                     ") out of range");
        }
        if (!std::isfinite(e.value) || e.value < 0.0) {
            throw std::runtime_error("tensor entry values must be finite and non-negative");
        }
        if (prev && !entry_order(*prev, e)) {
            throw std::runtime_error("tensor entries must be strictly sorted by (k, i, j)");
        }
        prev = &e;
    }
}

void validate_cooccurrence(const SparseTensor& tensor) {
    tensor.validate();
    // Entries within a slice are sorted by (i, j); the transpose of the slice
    // must contain exactly the same coordinates and values.
    std::map<std::tuple<int, int, int>, double> transposed;
    for (const TensorEntry& e : tensor.entries) {
        if (e.i == e.j) {
            throw std::runtime_error("co-occurrence tensor stores a diagonal entry at (" +
                                     std::to_string(e.i) + "," + std::to_string(e.j) + "," +
                                     std::to_string(e.k) + ")");
        }
        transposed[{e.k, e.j, e.i}] = e.value;
    }
    for (const TensorEntry& e : tensor.entries) {
        auto it = transposed.find({e.k, e.i, e.j});
        if (it == transposed.end() || it->second != e.value) {
            throw std::runtime_error("co-occurrence slice " + std::to_string(e.k) +
                                     " is not symmetric at (" + std::to_string(e.i) + "," +
                                     std::to_string(e.j) + ")");
        }
    }
}

SparseTensor build_cooccurrence_tensor(const Corpus& corpus, const Vocabulary& vocab,
                                       const TensorConfig& config) {
    config.validate();
    if (vocab.size() == 0) throw std::runtime_error("cannot build tensor from empty vocabulary");
    if (corpus.size() == 0) throw std::runtime_error("cannot build tensor from empty corpus");

    SparseTensor tensor;
    tensor.word_dim = static_cast<int>(vocab.size());
    tensor.article_dim = static_cast<int>(corpus.size());

    std::vector<int> ids;
    for (std::size_t k = 0; k < corpus.articles.size(); ++k) {
        const Article& article = corpus.articles[k];
        ids.clear();
        ids.reserve(article.tokens.size());
        for (const std::string& t : article.tokens) ids.push_back(vocab.lookup(t));

        // Count unordered in-window pairs; out-of-vocabulary tokens (id -1)
        // keep their positions so they still consume window distance.
        std::map<std::pair<int, int>, double> pairs;
        for (std::size_t p = 0; p < ids.size(); ++p) {
            if (ids[p] < 0) continue;
            std::size_t limit = std::min(ids.size(), p + static_cast<std::size_t>(config.window));
            for (std::size_t q = p + 1; q < limit; ++q) {
                if (ids[q] < 0 || ids[q] == ids[p]) continue;
                int lo = std::min(ids[p], ids[q]);
                int hi = std::max(ids[p], ids[q]);
                pairs[{lo, hi}] += 1.0;
            }
        }

        std::vector<TensorEntry> slice;
        slice.reserve(pairs.size() * 2);
        for (const auto& [coord, count] : pairs) {
            double value = config.mode == TensorMode::Binary ? 1.0 : count;
            slice.push_back({coord.first, coord.second, static_cast<int>(k), value});
            slice.push_back({coord.second, coord.first, static_cast<int>(k), value});
        }
        std::sort(slice.begin(), slice.end(), entry_order);
        tensor.entries.insert(tensor.entries.end(), slice.begin(), slice.end());
    }
    return tensor;
}

void write_tensor(const SparseTensor& tensor, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write tensor file: " + path.string());
    out << tensor.word_dim << " " << tensor.word_dim << " " << tensor.article_dim << "\n";
    out << std::setprecision(17);
    for (const TensorEntry& e : tensor.entries) {
        out << e.i << " " << e.j << " " << e.k << " " << e.value << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

SparseTensor read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open tensor file: " + path.string());
    SparseTensor tensor;
    int i_dim = 0, j_dim = 0;
    if (!(in >> i_dim >> j_dim >> tensor.article_dim)) {
        throw std::runtime_error(path.string() + ": malformed tensor header (expected \"I I M\")");
    }
    if (i_dim != j_dim) {
        throw std::runtime_error(path.string() + ": word modes must have equal dimension");
    }
    tensor.word_dim = i_dim;
    TensorEntry e;
    while (in >> e.i >> e.j >> e.k >> e.value) tensor.entries.push_back(e);
    if (!in.eof()) throw std::runtime_error(path.string() + ": malformed tensor entry line");
    tensor.validate();
    return tensor;
}

Eigen::MatrixXd TfidfMatrix::to_dense() const {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(article_dim, word_dim);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (const auto& [word, weight] : rows[k]) dense(static_cast<int>(k), word) = weight;
    }
    return dense;
}

TfidfMatrix build_tfidf(const Corpus& corpus, const Vocabulary& vocab) {
    if (vocab.size() == 0) throw std::runtime_error("cannot build tf-idf from empty vocabulary");
    const std::size_t m = corpus.size();

    std::vector<int> df(vocab.size(), 0);
    std::vector<std::map<int, int>> tf(m);
    for (std::size_t k = 0; k < m; ++k) {
        for (const std::string& t : corpus.articles[k].tokens) {
            int id = vocab.lookup(t);
            if (id < 0) continue;
            if (tf[k][id]++ == 0) ++df[id];
        }
    }

    TfidfMatrix out;
    out.article_dim = static_cast<int>(m);
    out.word_dim = static_cast<int>(vocab.size());
    out.rows.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        for (const auto& [id, count] : tf[k]) {
            double idf = std::log(static_cast<double>(m) / static_cast<double>(df[id]));
            double weight = static_cast<double>(count) * idf;
            if (weight > 0.0) out.rows[k].push_back({id, weight});
        }
    }
    return out;
}

}  // namespace newsprop

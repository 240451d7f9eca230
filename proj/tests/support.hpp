#pragma once

// Shared test fixtures: independent dense oracles for the sparse kernels,
// synthetic corpora with a controllable class signal, and scratch-directory
// plumbing. Everything here is deliberately naive — the point is to check
// the optimized library code against the obvious implementation.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "newsprop/corpus.hpp"
#include "newsprop/cpd.hpp"
#include "newsprop/tensor.hpp"

namespace testsupport {

// Unique scratch directory under the system temp root; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("newsprop_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// ---- dense tensor oracle -------------------------------------------------

// A 3-way tensor as a flat dense array, indexed [i][j][k].
struct DenseTensor {
    Eigen::Index di = 0, dj = 0, dk = 0;
    std::vector<double> values;

    DenseTensor(Eigen::Index i, Eigen::Index j, Eigen::Index k)
        : di(i), dj(j), dk(k), values(static_cast<std::size_t>(i * j * k), 0.0) {}

    double& at(Eigen::Index i, Eigen::Index j, Eigen::Index k) {
        return values[static_cast<std::size_t>((i * dj + j) * dk + k)];
    }
    double at(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
        return values[static_cast<std::size_t>((i * dj + j) * dk + k)];
    }
};

inline DenseTensor densify(const newsprop::SparseTensor& t) {
    DenseTensor dense(t.word_dim, t.word_dim, t.article_dim);
    for (const auto& e : t.entries) dense.at(e.i, e.j, e.k) += e.value;
    return dense;
}

// Triple-loop MTTKRP over the dense tensor: the reference the sparse kernel
// must match. mode selects the output dimension exactly as in the library.
inline Eigen::MatrixXd mttkrp_dense(const DenseTensor& x, const Eigen::MatrixXd& a,
                                    const Eigen::MatrixXd& b, const Eigen::MatrixXd& c,
                                    int mode) {
    const Eigen::Index rank = c.cols();
    Eigen::MatrixXd out;
    if (mode == 1) out = Eigen::MatrixXd::Zero(x.di, rank);
    if (mode == 2) out = Eigen::MatrixXd::Zero(x.dj, rank);
    if (mode == 3) out = Eigen::MatrixXd::Zero(x.dk, rank);
    for (Eigen::Index i = 0; i < x.di; ++i) {
        for (Eigen::Index j = 0; j < x.dj; ++j) {
            for (Eigen::Index k = 0; k < x.dk; ++k) {
                double v = x.at(i, j, k);
                if (v == 0.0) continue;
                for (Eigen::Index r = 0; r < rank; ++r) {
                    if (mode == 1) out(i, r) += v * b(j, r) * c(k, r);
                    if (mode == 2) out(j, r) += v * a(i, r) * c(k, r);
                    if (mode == 3) out(k, r) += v * a(i, r) * b(j, r);
                }
            }
        }
    }
    return out;
}

// || X - sum_r w_r a_r o b_r o c_r ||_F by direct expansion.
inline double residual_dense(const DenseTensor& x, const newsprop::FactorMatrices& f) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.di; ++i) {
        for (Eigen::Index j = 0; j < x.dj; ++j) {
            for (Eigen::Index k = 0; k < x.dk; ++k) {
                double model = 0.0;
                for (Eigen::Index r = 0; r < f.rank(); ++r) {
                    model += f.weights(r) * f.A(i, r) * f.B(j, r) * f.C(k, r);
                }
                double d = x.at(i, j, k) - model;
                sum += d * d;
            }
        }
    }
    return std::sqrt(sum);
}

// ---- synthetic corpora -----------------------------------------------------

struct SyntheticSpec {
    std::size_t articles = 100;
    std::size_t class_words = 30;     // tokens drawn from the class pool
    std::size_t shared_words = 10;    // tokens drawn from the shared pool
    std::size_t pool_size = 20;       // distinct words per pool
    double noise = 0.0;               // chance a class token flips to the other pool
    bool heterogeneous_lengths = false;  // alternate short/long articles
    // Extra occurrences of two article-specific shared-pool words, appended
    // as a fraction of the class-token budget. Mimics how real articles
    // hammer a few class-neutral terms (entity names, stock phrases), which
    // puts large class-blind spikes into raw co-occurrence counts that
    // binarization flattens.
    double burstiness = 0.0;
    std::uint64_t seed = 1;
};

// Two balanced classes with disjoint topic vocabularies plus a shared pool.
// Word distributions differ between classes, which is exactly the signal the
// co-occurrence pipeline is supposed to pick up. No stemming surprises: all
// words are stemmer fixed points of the form "topicNNN".
inline newsprop::Corpus synthetic_corpus(const SyntheticSpec& spec) {
    auto pool_word = [](const char* tag, std::size_t n) {
        std::ostringstream s;
        s << tag << n;
        return s.str();
    };
    std::vector<std::string> real_pool, fake_pool, shared_pool;
    for (std::size_t w = 0; w < spec.pool_size; ++w) {
        real_pool.push_back(pool_word("factual", w));
        fake_pool.push_back(pool_word("dubious", w));
        shared_pool.push_back(pool_word("common", w));
    }

    std::mt19937_64 eng(spec.seed);
    auto pick = [&](const std::vector<std::string>& pool) {
        return pool[eng() % pool.size()];
    };

    newsprop::Corpus corpus;
    for (std::size_t n = 0; n < spec.articles; ++n) {
        bool fake = n % 2 == 1;
        double scale = 1.0;
        if (spec.heterogeneous_lengths) scale = (n / 2) % 2 == 0 ? 0.5 : 2.0;
        auto scaled = [&](std::size_t count) {
            return std::max<std::size_t>(1, static_cast<std::size_t>(count * scale));
        };

        std::vector<std::string> burst;
        if (spec.burstiness > 0.0) {
            burst.push_back(pick(shared_pool));
            burst.push_back(pick(shared_pool));
        }

        std::vector<std::string> words;
        for (std::size_t w = 0; w < scaled(spec.class_words); ++w) {
            bool flip = spec.noise > 0.0 &&
                        (eng() >> 11) * 0x1.0p-53 < spec.noise;
            const auto& pool = (fake != flip) ? fake_pool : real_pool;
            words.push_back(pick(pool));
        }
        if (!burst.empty()) {
            std::size_t copies = static_cast<std::size_t>(
                spec.burstiness * double(scaled(spec.class_words)));
            for (std::size_t w = 0; w < copies; ++w) {
                words.push_back(burst[eng() % burst.size()]);
            }
        }
        for (std::size_t w = 0; w < scaled(spec.shared_words); ++w) {
            words.push_back(pick(shared_pool));
        }
        // Deterministic shuffle so class words and shared words interleave.
        for (std::size_t w = words.size(); w > 1; --w) {
            std::swap(words[w - 1], words[eng() % w]);
        }

        newsprop::Article article;
        std::ostringstream id;
        id << "art" << std::setw(5) << std::setfill('0') << n;
        article.id = id.str();
        std::ostringstream text;
        for (std::size_t w = 0; w < words.size(); ++w) text << (w ? " " : "") << words[w];
        article.text = text.str();
        article.label = fake ? newsprop::Label::Fake : newsprop::Label::Real;
        corpus.articles.push_back(std::move(article));
    }
    return corpus;
}

inline std::string to_jsonl(const newsprop::Corpus& corpus) {
    std::ostringstream out;
    for (const auto& a : corpus.articles) {
        out << "{\"id\": \"" << a.id << "\", \"text\": \"" << a.text << "\", \"label\": \""
            << newsprop::to_string(a.label) << "\"}\n";
    }
    return out.str();
}

// ---- misc ------------------------------------------------------------------

inline Eigen::MatrixXd random_points(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    Eigen::MatrixXd m(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            m(i, j) = ((eng() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
        }
    }
    return m;
}

}  // namespace testsupport

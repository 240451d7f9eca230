#pragma once

// Corpus loading and text normalization: raw articles in (jsonl / csv /
// directory of .txt), token sequences, vocabulary, and class balancing.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace newsprop {

enum class Label { Real, Fake, Unknown };

// Parses "real"/"fake"; empty or "unknown" map to Unknown. Anything else is
// an std::runtime_error (a typo in a label column should never pass silently).
Label parse_label(const std::string& text);
std::string to_string(Label label);

struct Article {
    std::string id;
    std::string text;                 // raw text as loaded
    std::vector<std::string> tokens;  // filled by preprocess_corpus
    Label label = Label::Unknown;
    std::string category;             // optional tag, empty if absent

    std::size_t length() const { return tokens.size(); }
};

struct LabelCounts {
    std::size_t real = 0;
    std::size_t fake = 0;
    std::size_t unknown = 0;
};

struct Corpus {
    std::vector<Article> articles;

    std::size_t size() const { return articles.size(); }
    LabelCounts label_counts() const;
};

struct Vocabulary {
    std::vector<std::string> words;                  // position = word index
    std::unordered_map<std::string, int> index;

    std::size_t size() const { return words.size(); }
    // -1 when the word is out of vocabulary.
    int lookup(const std::string& word) const {
        auto it = index.find(word);
        return it == index.end() ? -1 : it->second;
    }
};

// ---- stopwords ------------------------------------------------------------

// The bundled English list; kept byte-identical to data/stopwords_en.txt.
const std::string& default_stopword_text();
const std::vector<std::string>& default_stopword_list();
const std::unordered_set<std::string>& default_stopword_set();

// One word per line, UTF-8; blank lines ignored.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

// ---- preprocessing ---------------------------------------------------------

struct PreprocessOptions {
    bool use_stemmer = true;
    // nullptr selects the bundled English list. An empty set disables
    // stopword removal.
    const std::unordered_set<std::string>* stopwords = nullptr;
};

// Lowercases, splits on non-alphanumeric bytes (UTF-8 continuation bytes are
// treated as word material so non-English words survive as opaque tokens),
// drops tokens shorter than 2 bytes, removes stopwords, then stems.
// Stemming runs to a fixed point and stopword/length filters are re-applied
// afterwards, so the result maps to itself when preprocessed again.
std::vector<std::string> preprocess(const std::string& raw_text,
                                    const PreprocessOptions& options = {});

// Applies preprocess to every article, filling Article::tokens.
void preprocess_corpus(Corpus& corpus, const PreprocessOptions& options = {});

// ---- loading ---------------------------------------------------------------

enum class CorpusFormat { Auto, Jsonl, Csv, Directory };

CorpusFormat parse_corpus_format(const std::string& text);

// Loads raw articles. jsonl: one {"id","text","label","category"} object per
// line. csv: RFC-4180 with header id,text,label,category. directory: one
// .txt per article (id = filename stem, file order = sorted names) with an
// optional labels.csv sidecar (header id,label). Errors carry file/line
// context; duplicate ids and empty corpora are rejected.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format = CorpusFormat::Auto);

// ---- vocabulary and balancing ----------------------------------------------

// Most frequent tokens, ties broken lexicographically; max_vocab = 0 means
// unlimited. Rejects corpora with zero total tokens.
Vocabulary build_vocabulary(const Corpus& corpus, std::size_t max_vocab);

// Uniformly down-samples the larger of {real, fake} to the smaller's count,
// preserving article order. Articles with unknown labels are kept as-is.
// Rejects corpora where either class is empty.
Corpus downsample_balance(const Corpus& corpus, std::uint64_t seed);

}  // namespace newsprop

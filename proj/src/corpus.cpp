#include "newsprop/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "newsprop/csv.hpp"
#include "newsprop/porter.hpp"
#include "newsprop/random.hpp"

namespace newsprop {
namespace {

using nlohmann::json;

[[noreturn]] void fail_at(const std::string& file, std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << file << ":" << line << ": " << what;
    throw std::runtime_error(os.str());
}

// Token characters: ASCII alphanumerics plus any byte >= 0x80, so that UTF-8
// sequences pass through intact. Everything else separates tokens.
bool is_token_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

constexpr std::size_t kMinTokenBytes = 2;

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (is_token_byte(c)) {
            if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
            current.push_back(static_cast<char>(c));
        } else if (!current.empty()) {
            if (current.size() >= kMinTokenBytes) tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (current.size() >= kMinTokenBytes) tokens.push_back(std::move(current));
    return tokens;
}

void check_unique_ids(const Corpus& corpus, const std::string& file,
                      const std::vector<std::size_t>& lines) {
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < corpus.articles.size(); ++i) {
        const std::string& id = corpus.articles[i].id;
        auto [it, inserted] = seen.emplace(id, i);
        if (!inserted) {
            fail_at(file, lines.empty() ? i + 1 : lines[i],
                    "duplicate article id \"" + id + "\" (first seen at record " +
                        std::to_string(lines.empty() ? it->second + 1 : lines[it->second]) + ")");
        }
    }
}

Corpus load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path.string());
    Corpus corpus;
    std::vector<std::size_t> lines;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            fail_at(path.string(), lineno, std::string("malformed JSON: ") + e.what());
        }
        if (!record.is_object()) fail_at(path.string(), lineno, "record is not a JSON object");
        Article a;
        if (!record.contains("id") || !record["id"].is_string() ||
            record["id"].get<std::string>().empty()) {
            fail_at(path.string(), lineno, "missing or empty \"id\" field");
        }
        a.id = record["id"].get<std::string>();
        if (!record.contains("text") || !record["text"].is_string()) {
            fail_at(path.string(), lineno, "missing \"text\" field");
        }
        a.text = record["text"].get<std::string>();
        if (record.contains("label") && !record["label"].is_null()) {
            if (!record["label"].is_string()) fail_at(path.string(), lineno, "non-string \"label\"");
            try {
                a.label = parse_label(record["label"].get<std::string>());
            } catch (const std::exception& e) {
                fail_at(path.string(), lineno, e.what());
            }
        }
        if (record.contains("category") && !record["category"].is_null()) {
            if (!record["category"].is_string()) {
                fail_at(path.string(), lineno, "non-string \"category\"");
            }
            a.category = record["category"].get<std::string>();
        }
        corpus.articles.push_back(std::move(a));
        lines.push_back(lineno);
    }
    check_unique_ids(corpus, path.string(), lines);
    return corpus;
}

Corpus load_csv(const std::filesystem::path& path) {
    csv::Table table = csv::read_file(path);
    const std::vector<std::string> expected = {"id", "text", "label", "category"};
    if (table.header != expected) {
        throw std::runtime_error(path.string() + ": expected CSV header id,text,label,category");
    }
    Corpus corpus;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        Article a;
        a.id = row[0];
        if (a.id.empty()) fail_at(path.string(), r + 2, "empty id");
        a.text = row[1];
        try {
            a.label = parse_label(row[2]);
        } catch (const std::exception& e) {
            fail_at(path.string(), r + 2, e.what());
        }
        a.category = row[3];
        corpus.articles.push_back(std::move(a));
    }
    check_unique_ids(corpus, path.string(), {});
    return corpus;
}

Corpus load_directory(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());  // directory iteration order is unspecified

    Corpus corpus;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open article file: " + file.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        Article a;
        a.id = file.stem().string();
        a.text = buf.str();
        corpus.articles.push_back(std::move(a));
    }
    check_unique_ids(corpus, dir.string(), {});

    std::filesystem::path sidecar = dir / "labels.csv";
    if (std::filesystem::exists(sidecar)) {
        csv::Table table = csv::read_file(sidecar);
        if (table.header.size() < 2 || table.header[0] != "id" || table.header[1] != "label") {
            throw std::runtime_error(sidecar.string() + ": expected CSV header id,label[,category]");
        }
        bool has_category = table.header.size() >= 3 && table.header[2] == "category";
        std::unordered_map<std::string, std::size_t> by_id;
        for (std::size_t i = 0; i < corpus.articles.size(); ++i) by_id[corpus.articles[i].id] = i;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            auto it = by_id.find(row[0]);
            if (it == by_id.end()) {
                fail_at(sidecar.string(), r + 2, "label for unknown article id \"" + row[0] + "\"");
            }
            try {
                corpus.articles[it->second].label = parse_label(row[1]);
            } catch (const std::exception& e) {
                fail_at(sidecar.string(), r + 2, e.what());
            }
            if (has_category) corpus.articles[it->second].category = row[2];
        }
    }
    return corpus;
}

}  // namespace

Label parse_label(const std::string& text) {
    if (text == "real") return Label::Real;
    if (text == "fake") return Label::Fake;
    if (text.empty() || text == "unknown") return Label::Unknown;
    throw std::runtime_error("unknown label \"" + text + "\" (expected real, fake or unknown)");
}

std::string to_string(Label label) {
    switch (label) {
        case Label::Real: return "real";
        case Label::Fake: return "fake";
        default: return "unknown";
    }
}

LabelCounts Corpus::label_counts() const {
    LabelCounts counts;
    for (const Article& a : articles) {
        if (a.label == Label::Real) ++counts.real;
        else if (a.label == Label::Fake) ++counts.fake;
        else ++counts.unknown;
    }
    return counts;
}

std::vector<std::string> preprocess(const std::string& raw_text, const PreprocessOptions& options) {
    const std::unordered_set<std::string>& stop =
        options.stopwords ? *options.stopwords : default_stopword_set();
    std::vector<std::string> out;
    for (std::string& token : tokenize(raw_text)) {
        if (stop.count(token)) continue;
        if (options.use_stemmer) {
            token = porter_stem_fixpoint(std::move(token));
            // Stems can land on a stopword ("ares" -> "are") or collapse
            // below the length floor; re-filter so output text re-preprocesses
            // to itself.
            if (token.size() < kMinTokenBytes || stop.count(token)) continue;
        }
        out.push_back(std::move(token));
    }
    return out;
}

void preprocess_corpus(Corpus& corpus, const PreprocessOptions& options) {
    for (Article& a : corpus.articles) a.tokens = preprocess(a.text, options);
}

CorpusFormat parse_corpus_format(const std::string& text) {
    if (text == "auto") return CorpusFormat::Auto;
    if (text == "jsonl") return CorpusFormat::Jsonl;
    if (text == "csv") return CorpusFormat::Csv;
    if (text == "directory") return CorpusFormat::Directory;
    throw std::runtime_error("unknown corpus format \"" + text +
                             "\" (expected auto, jsonl, csv or directory)");
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("corpus path does not exist: " + path.string());
    }
    if (format == CorpusFormat::Auto) {
        if (std::filesystem::is_directory(path)) {
            format = CorpusFormat::Directory;
        } else if (path.extension() == ".jsonl" || path.extension() == ".ndjson") {
            format = CorpusFormat::Jsonl;
        } else if (path.extension() == ".csv") {
            format = CorpusFormat::Csv;
        } else {
            throw std::runtime_error("cannot infer corpus format from path: " + path.string());
        }
    }
    Corpus corpus;
    switch (format) {
        case CorpusFormat::Jsonl: corpus = load_jsonl(path); break;
        case CorpusFormat::Csv: corpus = load_csv(path); break;
        case CorpusFormat::Directory: corpus = load_directory(path); break;
        case CorpusFormat::Auto: break;  // unreachable
    }
    if (corpus.articles.empty()) throw std::runtime_error("empty corpus: " + path.string());
    return corpus;
}

Vocabulary build_vocabulary(const Corpus& corpus, std::size_t max_vocab) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const Article& a : corpus.articles) {
        for (const std::string& t : a.tokens) ++counts[t];
    }
    if (counts.empty()) {
        throw std::runtime_error("cannot build vocabulary: corpus has no tokens");
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (max_vocab > 0 && ranked.size() > max_vocab) ranked.resize(max_vocab);

    Vocabulary vocab;
    vocab.words.reserve(ranked.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        vocab.index.emplace(ranked[i].first, static_cast<int>(i));
        vocab.words.push_back(std::move(ranked[i].first));
    }
    return vocab;
}

Corpus downsample_balance(const Corpus& corpus, std::uint64_t seed) {
    LabelCounts counts = corpus.label_counts();
    if (counts.real == 0 || counts.fake == 0) {
        throw std::runtime_error("downsample_balance requires at least one article per class (real=" +
                                 std::to_string(counts.real) +
                                 ", fake=" + std::to_string(counts.fake) + ")");
    }
    if (counts.real == counts.fake) return corpus;

    Label larger = counts.real > counts.fake ? Label::Real : Label::Fake;
    std::size_t keep = std::min(counts.real, counts.fake);

    std::vector<std::size_t> larger_positions;
    for (std::size_t i = 0; i < corpus.articles.size(); ++i) {
        if (corpus.articles[i].label == larger) larger_positions.push_back(i);
    }
    rng::Engine eng(seed);
    std::vector<std::size_t> chosen = rng::sample_indices(larger_positions.size(), keep, eng);
    std::vector<bool> keep_mask(corpus.articles.size(), true);
    for (std::size_t p : larger_positions) keep_mask[p] = false;
    for (std::size_t c : chosen) keep_mask[larger_positions[c]] = true;

    Corpus out;
    for (std::size_t i = 0; i < corpus.articles.size(); ++i) {
        if (keep_mask[i]) out.articles.push_back(corpus.articles[i]);
    }
    return out;
}

}  // namespace newsprop

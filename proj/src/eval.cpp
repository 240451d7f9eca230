#include "newsprop/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "newsprop/random.hpp"

namespace newsprop {

long long round_half_even(double x) {
    if (x < 0.0) throw std::invalid_argument("round_half_even expects a non-negative value");
    double floor_part = std::floor(x);
    double fraction = x - floor_part;
    long long base = static_cast<long long>(floor_part);
    if (fraction > 0.5) return base + 1;
    if (fraction < 0.5) return base;
    return base % 2 == 0 ? base : base + 1;
}

void SplitSpec::validate() const {
    if (!(label_fraction > 0.0) || !(label_fraction < 1.0)) {
        throw std::invalid_argument("label fraction must lie strictly between 0 and 1");
    }
}

namespace {

std::vector<std::size_t> positions_with_label(const Corpus& corpus, Label label) {
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < corpus.articles.size(); ++i) {
        if (corpus.articles[i].label == label) positions.push_back(i);
    }
    return positions;
}

}  // namespace

LabelMask make_label_mask(const Corpus& corpus, const SplitSpec& spec) {
    spec.validate();
    if (corpus.size() == 0) throw std::invalid_argument("cannot mask an empty corpus");
    for (const Article& a : corpus.articles) {
        if (a.label == Label::Unknown) {
            throw std::invalid_argument("label mask requires ground truth for every article; \"" +
                                        a.id + "\" is unknown");
        }
    }

    LabelMask mask;
    mask.labels.entries.assign(corpus.size(), 0);
    rng::Engine eng(spec.seed);

    auto reveal = [&](const std::vector<std::size_t>& positions, long long count) {
        std::vector<std::size_t> chosen =
            rng::sample_indices(positions.size(), static_cast<std::size_t>(count), eng);
        for (std::size_t c : chosen) {
            std::size_t article = positions[c];
            mask.labels.entries[article] =
                corpus.articles[article].label == Label::Fake ? -1 : 1;
        }
    };

    if (spec.stratified) {
        for (Label cls : {Label::Real, Label::Fake}) {
            std::vector<std::size_t> positions = positions_with_label(corpus, cls);
            long long count =
                round_half_even(spec.label_fraction * static_cast<double>(positions.size()));
            if (count == 0) {
                throw std::invalid_argument("stratified mask would reveal zero \"" +
                                            to_string(cls) + "\" labels at p = " +
                                            std::to_string(spec.label_fraction));
            }
            reveal(positions, count);
        }
    } else {
        long long count =
            round_half_even(spec.label_fraction * static_cast<double>(corpus.size()));
        if (count == 0) {
            throw std::invalid_argument("label fraction p = " + std::to_string(spec.label_fraction) +
                                        " reveals zero labels on " + std::to_string(corpus.size()) +
                                        " articles");
        }
        std::vector<std::size_t> all(corpus.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        reveal(all, count);
    }

    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (mask.labels.entries[i] == 0) mask.held_out.push_back(i);
    }
    return mask;
}

MetricReport score(const std::vector<Label>& predictions, const Corpus& corpus,
                   const std::vector<std::size_t>& held_out) {
    if (predictions.size() != corpus.size()) {
        throw std::invalid_argument("predictions cover " + std::to_string(predictions.size()) +
                                    " articles, corpus has " + std::to_string(corpus.size()));
    }
    if (held_out.empty()) {
        throw std::invalid_argument("no held-out articles to score");
    }

    MetricReport report;
    Confusion& c = report.confusion;
    for (std::size_t idx : held_out) {
        if (idx >= corpus.size()) {
            throw std::invalid_argument("held-out index " + std::to_string(idx) + " out of range");
        }
        Label truth = corpus.articles[idx].label;
        if (truth == Label::Unknown) {
            throw std::invalid_argument("held-out article \"" + corpus.articles[idx].id +
                                        "\" has no ground truth to score against");
        }
        Label predicted = predictions[idx];
        if (predicted == Label::Unknown) {
            throw std::invalid_argument("missing prediction for held-out article \"" +
                                        corpus.articles[idx].id + "\"");
        }
        if (predicted == Label::Fake) {
            truth == Label::Fake ? ++c.tp : ++c.fp;
        } else {
            truth == Label::Real ? ++c.tn : ++c.fn;
        }
    }

    report.support = held_out.size();
    const long long total = c.total();
    report.accuracy = total > 0 ? static_cast<double>(c.tp + c.tn) / static_cast<double>(total) : 0.0;
    if (c.tp + c.fp > 0) {
        report.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    } else {
        report.precision_defined = false;
    }
    if (c.tp + c.fn > 0) {
        report.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    } else {
        report.recall_defined = false;
    }
    if (report.precision + report.recall > 0.0) {
        report.f1 =
            2.0 * report.precision * report.recall / (report.precision + report.recall);
    } else {
        report.f1_defined = false;
    }
    return report;
}

Embedding parse_embedding(const std::string& text) {
    if (text == "cp") return Embedding::Cp;
    if (text == "tfidf") return Embedding::Tfidf;
    throw std::runtime_error("unknown embedding \"" + text + "\" (expected cp or tfidf)");
}

std::string to_string(Embedding embedding) {
    return embedding == Embedding::Cp ? "cp" : "tfidf";
}

void SweepGrid::validate() const {
    if (embeddings.empty() || ranks.empty() || ks.empty() || windows.empty() || modes.empty() ||
        label_fractions.empty() || seeds.empty()) {
        throw std::invalid_argument("sweep grid has an empty axis");
    }
}

Corpus subsample_sensitivity(const Corpus& corpus, const SensitivityFilter& filter) {
    if (filter.length_band && filter.length_delta) {
        throw std::invalid_argument(
            "length_band and length_delta are mutually exclusive filter forms");
    }

    std::pair<std::size_t, std::size_t> band{0, std::numeric_limits<std::size_t>::max()};
    bool has_band = false;
    if (filter.length_band) {
        band = *filter.length_band;
        has_band = true;
    } else if (filter.length_delta) {
        // Mean over the articles the filter can actually keep, i.e. those
        // with known labels.
        double mean = 0.0;
        std::size_t known = 0;
        for (const Article& a : corpus.articles) {
            if (a.label == Label::Unknown) continue;
            mean += static_cast<double>(a.length());
            ++known;
        }
        mean /= known ? static_cast<double>(known) : 1.0;
        double lo = std::max(0.0, mean - *filter.length_delta);
        double hi = mean + *filter.length_delta;
        band = {static_cast<std::size_t>(std::ceil(lo)),
                static_cast<std::size_t>(std::floor(hi))};
        has_band = true;
    }

    Corpus filtered;
    for (const Article& a : corpus.articles) {
        if (a.label == Label::Unknown) continue;
        if (filter.category && a.label == Label::Fake && a.category != *filter.category) continue;
        if (has_band && (a.length() < band.first || a.length() > band.second)) continue;
        filtered.articles.push_back(a);
    }

    LabelCounts counts = filtered.label_counts();
    if (counts.real == 0 || counts.fake == 0) {
        throw std::runtime_error("sensitivity filter is unsatisfiable: " +
                                 std::to_string(counts.real) + " real / " +
                                 std::to_string(counts.fake) + " fake articles survive");
    }
    return downsample_balance(filtered, filter.seed);
}

}  // namespace newsprop

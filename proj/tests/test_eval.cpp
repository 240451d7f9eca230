#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "newsprop/eval.hpp"
#include "support.hpp"

using namespace newsprop;

namespace {

Corpus labeled_corpus(std::size_t reals, std::size_t fakes) {
    Corpus corpus;
    for (std::size_t i = 0; i < reals + fakes; ++i) {
        Article a;
        a.id = "a" + std::to_string(i);
        a.label = i < reals ? Label::Real : Label::Fake;
        corpus.articles.push_back(std::move(a));
    }
    return corpus;
}

}  // namespace

TEST_CASE("round_half_even resolves halves to the even neighbor") {
    CHECK(round_half_even(22.5) == 22);
    CHECK(round_half_even(23.5) == 24);
    CHECK(round_half_even(22.4) == 22);
    CHECK(round_half_even(22.6) == 23);
    CHECK(round_half_even(0.5) == 0);
    CHECK(round_half_even(1.5) == 2);
    CHECK(round_half_even(0.0) == 0);
    // 0.3 * 75 = 22.4999... in binary floating point; must land on 22.
    CHECK(round_half_even(0.3 * 75.0) == 22);
}

// ---- label masks ------------------------------------------------------------

TEST_CASE("stratified mask on 75+75 at p = 0.3 reveals 22 per class") {
    Corpus corpus = labeled_corpus(75, 75);
    SplitSpec spec;
    spec.label_fraction = 0.3;
    spec.seed = 5;
    spec.stratified = true;
    LabelMask mask = make_label_mask(corpus, spec);

    std::size_t revealed_real = 0, revealed_fake = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (mask.labels.entries[i] == 1) {
            ++revealed_real;
            CHECK(corpus.articles[i].label == Label::Real);
        }
        if (mask.labels.entries[i] == -1) {
            ++revealed_fake;
            CHECK(corpus.articles[i].label == Label::Fake);
        }
    }
    CHECK(revealed_real == 22);
    CHECK(revealed_fake == 22);
    CHECK(mask.held_out.size() == 150 - 44);

    // held_out is exactly the complement of the revealed positions.
    std::set<std::size_t> held(mask.held_out.begin(), mask.held_out.end());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CHECK(held.count(i) == (mask.labels.entries[i] == 0 ? 1 : 0));
    }
}

TEST_CASE("unstratified mask reveals round(p * M) labels overall") {
    Corpus corpus = labeled_corpus(90, 30);
    SplitSpec spec;
    spec.label_fraction = 0.25;
    spec.seed = 9;
    spec.stratified = false;
    LabelMask mask = make_label_mask(corpus, spec);
    std::size_t revealed = 0;
    for (int v : mask.labels.entries) revealed += v != 0;
    CHECK(revealed == 30);  // 0.25 * 120
    CHECK(mask.held_out.size() == 90);
}

TEST_CASE("masks are deterministic in the seed and vary across seeds") {
    Corpus corpus = labeled_corpus(40, 40);
    SplitSpec spec;
    spec.label_fraction = 0.2;
    spec.seed = 123;
    LabelMask m1 = make_label_mask(corpus, spec);
    LabelMask m2 = make_label_mask(corpus, spec);
    CHECK(m1.labels.entries == m2.labels.entries);
    CHECK(m1.held_out == m2.held_out);

    spec.seed = 124;
    LabelMask m3 = make_label_mask(corpus, spec);
    CHECK(m1.labels.entries != m3.labels.entries);
}

TEST_CASE("mask rejects fractions that round to zero or cover everything") {
    Corpus corpus = labeled_corpus(5, 5);
    SplitSpec spec;
    spec.label_fraction = 0.01;  // 0.05 labels per class -> rounds to 0
    CHECK_THROWS(make_label_mask(corpus, spec));

    spec.label_fraction = 1.0;
    CHECK_THROWS(spec.validate());
    spec.label_fraction = 0.0;
    CHECK_THROWS(spec.validate());
    spec.label_fraction = -0.3;
    CHECK_THROWS(spec.validate());
}

TEST_CASE("mask requires full ground truth and both classes when stratified") {
    Corpus corpus = labeled_corpus(10, 10);
    corpus.articles[3].label = Label::Unknown;
    SplitSpec spec;
    spec.label_fraction = 0.5;
    CHECK_THROWS(make_label_mask(corpus, spec));

    Corpus one_class = labeled_corpus(10, 0);
    CHECK_THROWS(make_label_mask(one_class, spec));
}

// ---- scoring ---------------------------------------------------------------

TEST_CASE("score worked example: tp=3 fp=1 tn=4 fn=2") {
    Corpus corpus = labeled_corpus(5, 5);  // 0-4 real, 5-9 fake
    std::vector<Label> predictions(10, Label::Real);
    // Three fakes found, two missed.
    predictions[5] = Label::Fake;
    predictions[6] = Label::Fake;
    predictions[7] = Label::Fake;
    // One real flagged.
    predictions[0] = Label::Fake;
    std::vector<std::size_t> held_out = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};

    MetricReport m = score(predictions, corpus, held_out);
    CHECK(m.confusion.tp == 3);
    CHECK(m.confusion.fp == 1);
    CHECK(m.confusion.tn == 4);
    CHECK(m.confusion.fn == 2);
    CHECK(m.accuracy == doctest::Approx(0.7));
    CHECK(m.precision == doctest::Approx(0.75));
    CHECK(m.recall == doctest::Approx(0.6));
    CHECK(m.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(m.support == 10);
    CHECK(m.precision_defined);
    CHECK(m.f1_defined);
}

TEST_CASE("score only counts held-out positions") {
    Corpus corpus = labeled_corpus(3, 3);
    std::vector<Label> predictions(6, Label::Real);
    predictions[3] = Label::Fake;
    std::vector<std::size_t> held_out = {3, 4};  // one fake hit, one fake miss
    MetricReport m = score(predictions, corpus, held_out);
    CHECK(m.support == 2);
    CHECK(m.confusion.tp == 1);
    CHECK(m.confusion.fn == 1);
    CHECK(m.accuracy == doctest::Approx(0.5));
}

TEST_CASE("score agrees with a brute-force confusion counter on random cases") {
    std::mt19937_64 eng(31337);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 2 + eng() % 40;
        Corpus corpus;
        std::vector<Label> predictions;
        for (std::size_t i = 0; i < n; ++i) {
            Article a;
            a.id = std::to_string(i);
            a.label = eng() % 2 ? Label::Fake : Label::Real;
            corpus.articles.push_back(a);
            predictions.push_back(eng() % 2 ? Label::Fake : Label::Real);
        }
        std::vector<std::size_t> held_out;
        for (std::size_t i = 0; i < n; ++i) {
            if (eng() % 3 != 0) held_out.push_back(i);
        }
        if (held_out.empty()) held_out.push_back(0);

        long long tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i : held_out) {
            bool truth_fake = corpus.articles[i].label == Label::Fake;
            bool pred_fake = predictions[i] == Label::Fake;
            tp += truth_fake && pred_fake;
            fp += !truth_fake && pred_fake;
            tn += !truth_fake && !pred_fake;
            fn += truth_fake && !pred_fake;
        }

        MetricReport m = score(predictions, corpus, held_out);
        CAPTURE(trial);
        CHECK(m.confusion.tp == tp);
        CHECK(m.confusion.fp == fp);
        CHECK(m.confusion.tn == tn);
        CHECK(m.confusion.fn == fn);
        CHECK(m.accuracy ==
              doctest::Approx(static_cast<double>(tp + tn) / static_cast<double>(held_out.size())));
        if (tp + fp > 0 && tp + fn > 0 && m.precision + m.recall > 0.0) {
            CHECK(m.f1 == doctest::Approx(2.0 * m.precision * m.recall /
                                          (m.precision + m.recall)));
        }
    }
}

TEST_CASE("zero-denominator metrics report 0 with cleared flags") {
    Corpus corpus = labeled_corpus(4, 0);  // no fakes at all
    corpus.articles.push_back([] {
        Article a;
        a.id = "f";
        a.label = Label::Fake;
        return a;
    }());

    // Nothing predicted fake: precision undefined.
    std::vector<Label> predictions(5, Label::Real);
    std::vector<std::size_t> held_out = {0, 1, 2, 3};
    MetricReport m = score(predictions, corpus, held_out);
    CHECK_FALSE(m.precision_defined);
    CHECK(m.precision == 0.0);
    // No fakes in the held-out set: recall undefined too.
    CHECK_FALSE(m.recall_defined);
    CHECK_FALSE(m.f1_defined);
    CHECK(m.accuracy == 1.0);
}

TEST_CASE("score validates its inputs") {
    Corpus corpus = labeled_corpus(2, 2);
    std::vector<Label> predictions(4, Label::Real);
    CHECK_THROWS(score(predictions, corpus, {}));       // empty held-out set
    CHECK_THROWS(score(predictions, corpus, {9}));      // out of range
    corpus.articles[1].label = Label::Unknown;
    CHECK_THROWS(score(predictions, corpus, {1}));      // unknown truth
    std::vector<Label> bad(4, Label::Unknown);
    CHECK_THROWS(score(bad, corpus, {0}));              // unknown prediction
    std::vector<Label> short_preds(2, Label::Real);
    CHECK_THROWS(score(short_preds, corpus, {0}));      // length mismatch
}

TEST_CASE("score is invariant under held-out permutation") {
    Corpus corpus = labeled_corpus(6, 6);
    std::vector<Label> predictions(12, Label::Fake);
    std::vector<std::size_t> order = {0, 3, 5, 7, 9, 11};
    MetricReport a = score(predictions, corpus, order);
    std::reverse(order.begin(), order.end());
    MetricReport b = score(predictions, corpus, order);
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.confusion.tp == b.confusion.tp);
    CHECK(a.f1 == b.f1);
}

// ---- sensitivity sub-sampling ------------------------------------------

namespace {

Corpus sensitivity_corpus() {
    Corpus corpus;
    auto add = [&](const std::string& id, Label label, const std::string& category,
                   std::size_t tokens) {
        Article a;
        a.id = id;
        a.label = label;
        a.category = category;
        a.tokens.assign(tokens, "tok");
        corpus.articles.push_back(std::move(a));
    };
    for (int i = 0; i < 20; ++i) add("real" + std::to_string(i), Label::Real, "", 100 + i * 20);
    for (int i = 0; i < 8; ++i) add("sat" + std::to_string(i), Label::Fake, "satire", 150 + i * 10);
    for (int i = 0; i < 12; ++i) add("hoax" + std::to_string(i), Label::Fake, "hoax", 200 + i * 10);
    add("mystery", Label::Unknown, "", 50);
    return corpus;
}

}  // namespace

TEST_CASE("category filter keeps only matching fakes, balanced with reals") {
    Corpus corpus = sensitivity_corpus();
    SensitivityFilter filter;
    filter.category = "satire";
    filter.seed = 3;
    Corpus sub = subsample_sensitivity(corpus, filter);
    auto counts = sub.label_counts();
    CHECK(counts.fake == 8);
    CHECK(counts.real == 8);
    CHECK(counts.unknown == 0);  // unknowns dropped
    for (const auto& a : sub.articles) {
        if (a.label == Label::Fake) CHECK(a.category == "satire");
    }
}

TEST_CASE("absolute length band keeps articles inside [lo, hi]") {
    Corpus corpus = sensitivity_corpus();
    SensitivityFilter filter;
    filter.length_band = {150, 260};
    filter.seed = 5;
    Corpus sub = subsample_sensitivity(corpus, filter);
    REQUIRE(!sub.articles.empty());
    for (const auto& a : sub.articles) {
        CHECK(a.length() >= 150);
        CHECK(a.length() <= 260);
    }
    auto counts = sub.label_counts();
    CHECK(counts.real == counts.fake);

    // The absolute band is idempotent: running the same filter again changes
    // nothing but the (already balanced) class sizes.
    Corpus again = subsample_sensitivity(sub, filter);
    CHECK(again.label_counts().real == counts.real);
    CHECK(again.label_counts().fake == counts.fake);
}

TEST_CASE("delta band resolves against the mean length at call time") {
    Corpus corpus = sensitivity_corpus();
    double mean = 0.0;
    std::size_t known = 0;
    for (const auto& a : corpus.articles) {
        if (a.label == Label::Unknown) continue;
        mean += static_cast<double>(a.length());
        ++known;
    }
    mean /= static_cast<double>(known);

    SensitivityFilter filter;
    filter.length_delta = 60.0;
    filter.seed = 7;
    Corpus sub = subsample_sensitivity(corpus, filter);
    REQUIRE(!sub.articles.empty());
    for (const auto& a : sub.articles) {
        CHECK(static_cast<double>(a.length()) >= mean - 60.0);
        CHECK(static_cast<double>(a.length()) <= mean + 60.0);
    }
}

TEST_CASE("unsatisfiable filters are rejected") {
    Corpus corpus = sensitivity_corpus();
    SensitivityFilter filter;
    filter.category = "nonexistent";
    CHECK_THROWS(subsample_sensitivity(corpus, filter));

    SensitivityFilter narrow;
    narrow.length_band = {1, 2};
    CHECK_THROWS(subsample_sensitivity(corpus, narrow));

    SensitivityFilter both;
    both.length_band = {100, 200};
    both.length_delta = 10.0;
    CHECK_THROWS(subsample_sensitivity(corpus, both));  // bands are exclusive
}

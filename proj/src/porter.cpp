#include "newsprop/porter.hpp"

#include <array>
#include <cstddef>
#include <string_view>

namespace newsprop {
namespace {

bool is_ascii_lower(const std::string& w) {
    for (char c : w) {
        if (c < 'a' || c > 'z') return false;
    }
    return true;
}

// A letter is a consonant unless it is a-e-i-o-u, or a 'y' preceded by a
// consonant. 'y' at position 0 counts as a consonant.
bool is_consonant(std::string_view w, std::size_t i) {
    char c = w[i];
    if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return false;
    if (c == 'y') return i == 0 || !is_consonant(w, i - 1);
    return true;
}

// The measure m of a stem: number of vowel->consonant transitions, i.e. m in
// the canonical form [C](VC){m}[V].
int measure(std::string_view stem) {
    int m = 0;
    bool prev_vowel = false;
    for (std::size_t i = 0; i < stem.size(); ++i) {
        bool cons = is_consonant(stem, i);
        if (cons && prev_vowel) ++m;
        prev_vowel = !cons;
    }
    return m;
}

bool contains_vowel(std::string_view stem) {
    for (std::size_t i = 0; i < stem.size(); ++i) {
        if (!is_consonant(stem, i)) return true;
    }
    return false;
}

bool ends_double_consonant(std::string_view w) {
    std::size_t n = w.size();
    return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

// *o: stem ends consonant-vowel-consonant where the final consonant is not
// w, x or y. Enables the trailing-e restoration ("hop" + "ing" -> "hope").
bool ends_cvc(std::string_view w) {
    std::size_t n = w.size();
    if (n < 3) return false;
    if (!is_consonant(w, n - 3) || is_consonant(w, n - 2) || !is_consonant(w, n - 1)) return false;
    char c = w[n - 1];
    return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(std::string_view w, std::string_view suffix) {
    return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
    int min_measure;  // condition: m(stem) > min_measure
};

// Longest-match semantics shared by steps 2-4: the first rule whose suffix
// matches decides the outcome. If its measure condition fails, no shorter
// suffix is tried. Rule tables below are ordered longest-first where needed.
bool apply_rules(std::string& w, const Rule* rules, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
        const Rule& r = rules[i];
        if (!ends_with(w, r.suffix)) continue;
        std::string_view stem(w.data(), w.size() - r.suffix.size());
        if (measure(stem) > r.min_measure) {
            w.resize(stem.size());
            w.append(r.replacement);
        }
        return true;
    }
    return false;
}

// Step 1a: plurals. sses -> ss, ies -> i, ss -> ss, s -> (drop).
void step1a(std::string& w) {
    if (ends_with(w, "sses")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ies")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ss")) {
        // keep
    } else if (ends_with(w, "s")) {
        w.resize(w.size() - 1);
    }
}

// Step 1b: past tense / progressive. (m>0) eed -> ee; (*v*) ed -> (drop);
// (*v*) ing -> (drop). After a successful ed/ing removal the ending is
// tidied: at->ate, bl->ble, iz->ize, undouble a final double consonant other
// than l/s/z, or restore 'e' when m == 1 and the stem ends cvc.
void step1b(std::string& w) {
    if (ends_with(w, "eed")) {
        std::string_view stem(w.data(), w.size() - 3);
        if (measure(stem) > 0) w.resize(w.size() - 1);
        return;
    }
    bool stripped = false;
    if (ends_with(w, "ed")) {
        std::string_view stem(w.data(), w.size() - 2);
        if (contains_vowel(stem)) {
            w.resize(stem.size());
            stripped = true;
        }
    } else if (ends_with(w, "ing")) {
        std::string_view stem(w.data(), w.size() - 3);
        if (contains_vowel(stem)) {
            w.resize(stem.size());
            stripped = true;
        }
    }
    if (!stripped) return;
    if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
        w.push_back('e');
    } else if (ends_double_consonant(w)) {
        char c = w.back();
        if (c != 'l' && c != 's' && c != 'z') w.resize(w.size() - 1);
    } else if (measure(w) == 1 && ends_cvc(w)) {
        w.push_back('e');
    }
}

// Step 1c: (*v*) y -> i.
void step1c(std::string& w) {
    if (ends_with(w, "y")) {
        std::string_view stem(w.data(), w.size() - 1);
        if (contains_vowel(stem)) w.back() = 'i';
    }
}

constexpr std::array<Rule, 20> kStep2 = {{
    {"ational", "ate", 0},
    {"tional", "tion", 0},
    {"enci", "ence", 0},
    {"anci", "ance", 0},
    {"izer", "ize", 0},
    {"abli", "able", 0},
    {"alli", "al", 0},
    {"entli", "ent", 0},
    {"eli", "e", 0},
    {"ousli", "ous", 0},
    {"ization", "ize", 0},
    {"ation", "ate", 0},
    {"ator", "ate", 0},
    {"alism", "al", 0},
    {"iveness", "ive", 0},
    {"fulness", "ful", 0},
    {"ousness", "ous", 0},
    {"aliti", "al", 0},
    {"iviti", "ive", 0},
    {"biliti", "ble", 0},
}};

constexpr std::array<Rule, 7> kStep3 = {{
    {"icate", "ic", 0},
    {"ative", "", 0},
    {"alize", "al", 0},
    {"iciti", "ic", 0},
    {"ical", "ic", 0},
    {"ful", "", 0},
    {"ness", "", 0},
}};

constexpr std::array<Rule, 19> kStep4 = {{
    {"ement", "", 1},
    {"ance", "", 1},
    {"ence", "", 1},
    {"able", "", 1},
    {"ible", "", 1},
    {"ment", "", 1},
    {"ant", "", 1},
    {"ent", "", 1},
    {"ism", "", 1},
    {"ate", "", 1},
    {"iti", "", 1},
    {"ous", "", 1},
    {"ive", "", 1},
    {"ize", "", 1},
    {"ion", "", 1},  // extra condition: stem must end in s or t
    {"al", "", 1},
    {"er", "", 1},
    {"ic", "", 1},
    {"ou", "", 1},
}};

// Step 2/3 suffixes never overlap so their a-priori order is irrelevant;
// kStep4 is longest-first so that "ement" wins over "ment" and "ent".
void step2(std::string& w) { apply_rules(w, kStep2.data(), kStep2.size()); }
void step3(std::string& w) { apply_rules(w, kStep3.data(), kStep3.size()); }

void step4(std::string& w) {
    for (const Rule& r : kStep4) {
        if (!ends_with(w, r.suffix)) continue;
        std::string_view stem(w.data(), w.size() - r.suffix.size());
        if (r.suffix == "ion" && !(ends_with(stem, "s") || ends_with(stem, "t"))) {
            return;  // longest match found but side condition failed
        }
        if (measure(stem) > 1) w.resize(stem.size());
        return;
    }
}

// Step 5a: (m>1) e -> (drop); (m=1 and not *o) e -> (drop).
void step5a(std::string& w) {
    if (!ends_with(w, "e")) return;
    std::string_view stem(w.data(), w.size() - 1);
    int m = measure(stem);
    if (m > 1 || (m == 1 && !ends_cvc(stem))) w.resize(stem.size());
}

// Step 5b: (m>1 and *d and *L) -> single letter ("controll" -> "control").
void step5b(std::string& w) {
    if (ends_double_consonant(w) && w.back() == 'l' && measure(w) > 1) {
        w.resize(w.size() - 1);
    }
}

}  // namespace

std::string porter_stem(const std::string& word) {
    if (word.empty() || !is_ascii_lower(word)) return word;
    std::string w = word;
    step1a(w);
    step1b(w);
    step1c(w);
    step2(w);
    step3(w);
    step4(w);
    step5a(w);
    step5b(w);
    return w;
}

std::string porter_stem_fixpoint(std::string word) {
    for (;;) {
        std::string next = porter_stem(word);
        if (next == word) return word;
        word = std::move(next);
    }
}

}  // namespace newsprop

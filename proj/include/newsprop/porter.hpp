#pragma once

#include <string>

namespace newsprop {

// Classic five-step suffix-stripping stemmer (Porter's original rule tables,
// longest-match-then-condition semantics). Expects a lowercase ASCII word;
// words containing anything else are returned unchanged.
std::string porter_stem(const std::string& word);

// porter_stem applied until the output stops changing. The single-pass
// algorithm is not idempotent ("agreed" -> "agre" -> "agr"), so pipeline
// code that must be stable under re-preprocessing uses this variant.
// Terminates because every rewriting pass shortens the word except the
// y->i substitution, which cannot fire twice.
std::string porter_stem_fixpoint(std::string word);

}  // namespace newsprop

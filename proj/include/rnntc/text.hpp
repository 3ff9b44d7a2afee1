#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rnntc {

/// Stop-word list and lemma exception dictionary used by clean_text.
///
/// Both are plain-text assets: the stop-word list has one word per line and
/// the lemma table has one `surface<TAB>lemma` pair per line. Blank lines and
/// lines starting with '#' are ignored. The bundled copies live in assets/
/// and are compiled into the library.
struct NormalizationTables {
    std::unordered_set<std::string> stop_words;
    std::unordered_map<std::string, std::string> lemmas;

    static NormalizationTables bundled();
    static NormalizationTables parse(std::string_view stop_word_text, std::string_view lemma_text);
    static NormalizationTables from_files(const std::filesystem::path& stop_words,
                                          const std::filesystem::path& lemmas);

    /// Order-independent hash of both tables, stored alongside bundles and models.
    std::string fingerprint() const;
};

/// Lowercases ASCII letters, deletes apostrophes, and turns every other
/// non-alphanumeric byte into a space.
std::string normalize_characters(std::string_view raw);

/// Whitespace tokenization.
std::vector<std::string> split_whitespace(std::string_view text);

/// Exception-dictionary lookup, then suffix rules, repeated to a fixed point.
std::string lemmatize(std::string_view token, const NormalizationTables& tables);

/// Full narrative normalization: character cleanup, tokenization, stop-word
/// removal, lemmatization. Lemmas that land on a stop word are dropped too,
/// which keeps clean_text idempotent on its own joined output.
std::vector<std::string> clean_text(std::string_view raw, const NormalizationTables& tables);

}  // namespace rnntc

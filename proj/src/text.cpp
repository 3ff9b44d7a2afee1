#include "rnntc/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "rnntc/errors.hpp"
#include "rnntc/hash.hpp"

namespace rnntc {

namespace detail {
extern const std::string_view kBundledStopWords;
extern const std::string_view kBundledLemmas;
}  // namespace detail

namespace {

// Shortest stem a suffix rule may leave behind.
constexpr std::size_t kMinStem = 4;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class Fn>
void for_each_content_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = nl == std::string_view::npos ? text : text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (trim(line).empty() || trim(line).front() == '#') {
            continue;
        }
        fn(line, line_no);
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open normalization table '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// "stopp" -> "stop", but "call" and "miss" keep their doubled letter.
void undouble(std::string& stem) {
    const std::size_t n = stem.size();
    if (n >= 2 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1]) && stem[n - 1] != 'l' &&
        stem[n - 1] != 's' && stem[n - 1] != 'z' && std::isalpha(static_cast<unsigned char>(stem[n - 1]))) {
        stem.pop_back();
    }
}

// One application of the first matching suffix rule. Returns false when no
// rule fires.
bool apply_suffix_rule(std::string& w) {
    const std::size_t n = w.size();
    if (ends_with(w, "ies") && n >= 5) {
        w.replace(n - 3, 3, "y");
        return true;
    }
    if (ends_with(w, "sses")) {
        w.resize(n - 2);
        return true;
    }
    if ((ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "xes") || ends_with(w, "zzes")) &&
        n - 2 >= kMinStem - 1) {
        w.resize(n - 2);
        return true;
    }
    if (ends_with(w, "ing") && n - 3 >= kMinStem) {
        w.resize(n - 3);
        undouble(w);
        return true;
    }
    if (ends_with(w, "ed") && n - 2 >= kMinStem) {
        w.resize(n - 2);
        undouble(w);
        return true;
    }
    if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is") && n >= kMinStem) {
        w.pop_back();
        return true;
    }
    return false;
}

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    return out;
}

}  // namespace

NormalizationTables NormalizationTables::parse(std::string_view stop_word_text, std::string_view lemma_text) {
    NormalizationTables tables;
    for_each_content_line(stop_word_text, [&](std::string_view line, std::size_t) {
        tables.stop_words.emplace(ascii_lower(trim(line)));
    });
    for_each_content_line(lemma_text, [&](std::string_view line, std::size_t line_no) {
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos) {
            throw InputError("lemma table line " + std::to_string(line_no) + ": expected surface<TAB>lemma");
        }
        const auto surface = trim(line.substr(0, tab));
        const auto lemma = trim(line.substr(tab + 1));
        if (surface.empty() || lemma.empty()) {
            throw InputError("lemma table line " + std::to_string(line_no) + ": empty field");
        }
        tables.lemmas.insert_or_assign(ascii_lower(surface), ascii_lower(lemma));
    });
    return tables;
}

NormalizationTables NormalizationTables::bundled() {
    static const NormalizationTables tables = parse(detail::kBundledStopWords, detail::kBundledLemmas);
    return tables;
}

NormalizationTables NormalizationTables::from_files(const std::filesystem::path& stop_words,
                                                    const std::filesystem::path& lemmas) {
    return parse(read_file(stop_words), read_file(lemmas));
}

std::string NormalizationTables::fingerprint() const {
    std::vector<std::string> stops(stop_words.begin(), stop_words.end());
    std::sort(stops.begin(), stops.end());
    std::vector<std::pair<std::string, std::string>> pairs(lemmas.begin(), lemmas.end());
    std::sort(pairs.begin(), pairs.end());

    Fingerprint fp;
    for (const auto& s : stops) {
        fp.update(s);
        fp.update("\n");
    }
    fp.update("\x1f");
    for (const auto& [surface, lemma] : pairs) {
        fp.update(surface);
        fp.update("\t");
        fp.update(lemma);
        fp.update("\n");
    }
    return fp.hex();
}

std::string normalize_characters(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto c = static_cast<unsigned char>(raw[i]);
        if (c >= 'A' && c <= 'Z') {
            out.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            out.push_back(static_cast<char>(c));
        } else if (c == '\'') {
            // pilot's -> pilots
        } else if (c == 0xE2 && i + 2 < raw.size() && static_cast<unsigned char>(raw[i + 1]) == 0x80 &&
                   (static_cast<unsigned char>(raw[i + 2]) == 0x98 || static_cast<unsigned char>(raw[i + 2]) == 0x99)) {
            i += 2;  // typographic single quotes
        } else {
            out.push_back(' ');
        }
    }
    return out;
}

std::vector<std::string> split_whitespace(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        const std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        if (pos > start) {
            tokens.emplace_back(text.substr(start, pos - start));
        }
    }
    return tokens;
}

std::string lemmatize(std::string_view token, const NormalizationTables& tables) {
    std::string word(token);
    // Every rule shortens the word, so this terminates.
    for (;;) {
        if (const auto it = tables.lemmas.find(word); it != tables.lemmas.end()) {
            return it->second;
        }
        if (!apply_suffix_rule(word)) {
            break;
        }
    }
    return word;
}

std::vector<std::string> clean_text(std::string_view raw, const NormalizationTables& tables) {
    std::vector<std::string> out;
    for (auto& token : split_whitespace(normalize_characters(raw))) {
        if (tables.stop_words.contains(token)) {
            continue;
        }
        std::string lemma = lemmatize(token, tables);
        if (lemma.empty() || tables.stop_words.contains(lemma)) {
            continue;
        }
        out.push_back(std::move(lemma));
    }
    return out;
}

}  // namespace rnntc

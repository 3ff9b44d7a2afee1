#include "rnntc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rnntc/csv.hpp"
#include "rnntc/errors.hpp"
#include "rnntc/hash.hpp"
#include "rnntc/rng.hpp"

namespace rnntc {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> counts)
    : tokens_(std::move(tokens)), counts_(std::move(counts)) {
    if (!counts_.empty() && counts_.size() != tokens_.size()) {
        throw std::invalid_argument("vocabulary counts must parallel tokens");
    }
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        const auto [it, inserted] = index_.emplace(tokens_[i], static_cast<TokenId>(i) + kFirstTokenId);
        if (!inserted) {
            throw InputError("duplicate vocabulary token '" + tokens_[i] + "'");
        }
    }
}

TokenId Vocabulary::id_of(std::string_view token) const {
    const auto it = index_.find(std::string(token));
    return it == index_.end() ? kOovId : it->second;
}

const std::string& Vocabulary::token_of(TokenId id) const {
    if (id < kFirstTokenId || static_cast<std::size_t>(id) >= id_limit()) {
        throw std::out_of_range("token id " + std::to_string(id) + " is not an assigned id");
    }
    return tokens_[static_cast<std::size_t>(id - kFirstTokenId)];
}

std::string Vocabulary::fingerprint() const {
    Fingerprint fp;
    for (const auto& t : tokens_) {
        fp.update(t);
        fp.update("\n");
    }
    return fp.hex();
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus, std::size_t max_size) {
    if (max_size < 1) {
        throw std::invalid_argument("vocabulary max_size must be at least 1");
    }
    // std::map iterates in ascending byte order, which is the tie-break.
    std::map<std::string, std::uint64_t> freq;
    for (const auto& doc : corpus) {
        for (const auto& tok : doc) {
            ++freq[tok];
        }
    }
    std::vector<std::pair<std::string, std::uint64_t>> ranked(freq.begin(), freq.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > max_size) {
        ranked.resize(max_size);
    }
    std::vector<std::string> tokens;
    std::vector<std::uint64_t> counts;
    tokens.reserve(ranked.size());
    counts.reserve(ranked.size());
    for (auto& [tok, n] : ranked) {
        tokens.push_back(std::move(tok));
        counts.push_back(n);
    }
    return Vocabulary(std::move(tokens), std::move(counts));
}

std::string_view to_string(PadSide side) { return side == PadSide::Pre ? "pre" : "post"; }

std::string_view to_string(TruncateSide side) { return side == TruncateSide::KeepFirst ? "keep-first" : "keep-last"; }

PadSide parse_pad_side(std::string_view text) {
    if (text == "pre") {
        return PadSide::Pre;
    }
    if (text == "post") {
        return PadSide::Post;
    }
    throw InputError("unknown padding side '" + std::string(text) + "' (expected pre or post)");
}

TruncateSide parse_truncate_side(std::string_view text) {
    if (text == "keep-first") {
        return TruncateSide::KeepFirst;
    }
    if (text == "keep-last") {
        return TruncateSide::KeepLast;
    }
    throw InputError("unknown truncation side '" + std::string(text) + "' (expected keep-first or keep-last)");
}

TokenSequence fit_length(std::span<const TokenId> ids, const EncodingOptions& options) {
    const std::size_t len = options.seq_len;
    if (len < 1) {
        throw std::invalid_argument("sequence length must be at least 1");
    }
    if (ids.size() >= len) {
        const auto first = options.truncate == TruncateSide::KeepFirst ? ids.begin() : ids.end() - static_cast<std::ptrdiff_t>(len);
        return TokenSequence(first, first + static_cast<std::ptrdiff_t>(len));
    }
    TokenSequence out(len, kPadId);
    const std::size_t offset = options.pad == PadSide::Pre ? len - ids.size() : 0;
    std::copy(ids.begin(), ids.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
    return out;
}

TokenSequence encode_sequence(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                              const EncodingOptions& options) {
    TokenSequence ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) {
        ids.push_back(vocab.id_of(t));
    }
    return fit_length(ids, options);
}

std::vector<std::string> default_class_names() { return {"None", "Minor", "Substantial", "Destroyed"}; }

std::size_t label_index(std::string_view label, const std::vector<std::string>& class_names) {
    const auto wanted = trim(label);
    for (std::size_t i = 0; i < class_names.size(); ++i) {
        if (iequals(wanted, class_names[i])) {
            return i;
        }
    }
    throw InputError("unknown label '" + std::string(label) + "'");
}

std::vector<double> one_hot(std::size_t index, std::size_t n_classes) {
    if (index >= n_classes) {
        throw std::out_of_range("class index out of range");
    }
    std::vector<double> v(n_classes, 0.0);
    v[index] = 1.0;
    return v;
}

LabelEncoding encode_labels(std::string_view label, const std::vector<std::string>& class_names) {
    const std::size_t idx = label_index(label, class_names);
    return {idx, one_hot(idx, class_names.size())};
}

DatasetSplit split_dataset(std::size_t n, std::uint64_t seed) {
    const std::size_t n_test = (2 * n + 5) / 10;
    const std::size_t pool = n - n_test;
    const std::size_t n_val = (pool + 5) / 10;
    const std::size_t n_train = pool - n_val;
    if (n < 3 || n_test == 0 || n_val == 0 || n_train == 0) {
        throw InputError("insufficient records for a train/validation/test split: " + std::to_string(n));
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    Rng rng(seed);
    rng.shuffle(order);

    DatasetSplit split;
    split.seed = seed;
    split.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test),
                            order.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
    split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test + n_val), order.end());
    return split;
}

CsvLoadResult load_csv(const std::filesystem::path& path, std::string_view narrative_column,
                       std::string_view label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open input file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto rows = parse_csv(buf.str());
    if (rows.empty()) {
        throw InputError("'" + path.string() + "' has no header row");
    }

    const auto& header = rows.front().fields;
    auto column = [&](std::string_view name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) {
                return i;
            }
        }
        throw InputError("missing column '" + std::string(name) + "' in '" + path.string() + "'");
    };
    const std::size_t text_col = column(narrative_column);
    const std::size_t label_col = column(label_column);

    CsvLoadResult result;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        ++result.rows_read;
        if (row.fields.size() != header.size()) {
            throw InputError("malformed row " + std::to_string(r) + " (line " + std::to_string(row.line) + "): " +
                             std::to_string(row.fields.size()) + " fields, header has " +
                             std::to_string(header.size()));
        }
        const auto label = trim(row.fields[label_col]);
        if (label.empty()) {
            ++result.dropped_empty_label;
            continue;
        }
        result.records.push_back({row.fields[text_col], std::string(label)});
    }
    return result;
}

const std::vector<std::vector<std::string>>& synthetic_keywords() {
    static const std::vector<std::vector<std::string>> keywords = {
        {"uneventful", "precautionary", "routine", "nil", "undamaged", "intact"},
        {"scratch", "dent", "scuff", "chip", "superficial", "cosmetic"},
        {"buckle", "fracture", "crumple", "collapse", "rupture", "shear"},
        {"destroyed", "wreckage", "inferno", "obliterate", "burnt", "demolish"},
    };
    return keywords;
}

std::vector<RawRecord> generate_synthetic_corpus(std::uint64_t seed, std::size_t n_per_class) {
    if (n_per_class < 1) {
        throw std::invalid_argument("n_per_class must be at least 1");
    }
    static const std::vector<std::string> filler = {
        "aircraft", "pilot",      "runway",   "approach",  "landing",    "taxi",      "crew",
        "engine",   "reported",   "departure", "tower",    "weather",    "wind",      "flight",
        "passenger", "maintenance", "wing",    "gear",      "airport",    "controller", "clearance",
        "altitude", "descent",    "climb",    "fuel",      "cabin",      "helicopter", "training",
        "student",  "instructor", "circuit",  "hangar",    "operator",   "checklist", "visibility",
        "radio",    "propeller",  "aerodrome", "turbulence", "inspection"};
    static const std::vector<std::string> openers = {"During the", "After the", "While on", "Before the", "On"};
    static const std::vector<std::string> joiners = {"the", "and", "was", "with", "of", "to"};

    const auto& keywords = synthetic_keywords();
    const auto names = default_class_names();
    Rng rng(seed);

    std::vector<RawRecord> out;
    out.reserve(n_per_class * names.size());
    for (std::size_t i = 0; i < n_per_class; ++i) {
        for (std::size_t k = 0; k < names.size(); ++k) {
            const std::size_t n_sentences = 1 + rng.below(2);
            std::vector<std::vector<std::string>> sentences(n_sentences);
            for (auto& words : sentences) {
                const std::size_t n_words = 3 + rng.below(4);
                for (std::size_t w = 0; w < n_words; ++w) {
                    words.push_back(filler[rng.below(filler.size())]);
                    if (w + 1 < n_words && rng.below(3) == 0) {
                        words.push_back(joiners[rng.below(joiners.size())]);
                    }
                }
            }
            const std::size_t n_keywords = 2 + rng.below(2);
            for (std::size_t j = 0; j < n_keywords; ++j) {
                auto& words = sentences[rng.below(sentences.size())];
                const std::size_t at = rng.below(words.size() + 1);
                words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), keywords[k][rng.below(keywords[k].size())]);
            }

            std::string text;
            for (const auto& words : sentences) {
                if (!text.empty()) {
                    text += ' ';
                }
                text += openers[rng.below(openers.size())];
                for (const auto& w : words) {
                    text += ' ';
                    text += w;
                }
                text += rng.below(4) == 0 ? "!" : ".";
            }
            out.push_back({std::move(text), names[k]});
        }
    }
    return out;
}

std::string EncodedDataset::fingerprint() const {
    Fingerprint fp;
    fp.update(static_cast<std::uint64_t>(sequences.size()));
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        fp.update(static_cast<std::uint64_t>(labels.at(i)));
        for (const TokenId id : sequences[i]) {
            fp.update(static_cast<std::uint64_t>(id));
        }
    }
    return fp.hex();
}

}  // namespace rnntc

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rnntc/text.hpp"

namespace rnntc {

using TokenId = std::int32_t;
using TokenSequence = std::vector<TokenId>;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kOovId = 1;
inline constexpr TokenId kFirstTokenId = 2;

/// One occurrence narrative and its damage-level label as read from input.
struct RawRecord {
    std::string narrative;
    std::string label;

    bool operator==(const RawRecord&) const = default;
};

/// Frequency-ranked token -> id map. Ids 0 and 1 are reserved for padding
/// and out-of-vocabulary; assigned tokens occupy [2, 2 + size()).
class Vocabulary {
public:
    Vocabulary() = default;

    /// Tokens in id order; `counts` may be empty or parallel to `tokens`.
    Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> counts = {});

    TokenId id_of(std::string_view token) const;
    const std::string& token_of(TokenId id) const;

    std::size_t size() const { return tokens_.size(); }
    /// One past the largest valid id.
    std::size_t id_limit() const { return tokens_.size() + kFirstTokenId; }

    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }

    std::string fingerprint() const;

    bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, TokenId> index_;
};

/// Keeps the `max_size` most frequent tokens; equal counts are ordered by
/// ascending byte-wise token order.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus, std::size_t max_size);

enum class PadSide { Pre, Post };
enum class TruncateSide {
    KeepFirst,  // drop the tail
    KeepLast,   // drop the head
};

struct EncodingOptions {
    std::size_t seq_len = 2000;
    PadSide pad = PadSide::Pre;
    TruncateSide truncate = TruncateSide::KeepFirst;

    bool operator==(const EncodingOptions&) const = default;
};

std::string_view to_string(PadSide side);
std::string_view to_string(TruncateSide side);
PadSide parse_pad_side(std::string_view text);
TruncateSide parse_truncate_side(std::string_view text);

TokenSequence encode_sequence(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                              const EncodingOptions& options);

/// Pads/truncates an id list that is already mapped.
TokenSequence fit_length(std::span<const TokenId> ids, const EncodingOptions& options);

std::vector<std::string> default_class_names();

struct LabelEncoding {
    std::size_t index = 0;
    std::vector<double> one_hot;
};

/// Case-insensitive (ASCII) label lookup. Throws InputError on no match.
LabelEncoding encode_labels(std::string_view label, const std::vector<std::string>& class_names);
std::size_t label_index(std::string_view label, const std::vector<std::string>& class_names);
std::vector<double> one_hot(std::size_t index, std::size_t n_classes);

struct DatasetSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;

    bool operator==(const DatasetSplit&) const = default;
};

/// Seeded shuffle, then test = round(n/5), validation = round(pool/10) of
/// the remaining pool, rest train. Rounding is half-up, in integers.
DatasetSplit split_dataset(std::size_t n, std::uint64_t seed);

struct CsvLoadResult {
    std::vector<RawRecord> records;
    std::size_t rows_read = 0;
    std::size_t dropped_empty_label = 0;
};

CsvLoadResult load_csv(const std::filesystem::path& path, std::string_view narrative_column = "Summary",
                       std::string_view label_column = "damageLevel");

/// Disjoint per-class signal words, indexed like default_class_names().
const std::vector<std::vector<std::string>>& synthetic_keywords();

/// 4 * n_per_class template narratives, classes interleaved, each carrying
/// two or three signal words for its class amid shared filler vocabulary.
std::vector<RawRecord> generate_synthetic_corpus(std::uint64_t seed, std::size_t n_per_class);

/// Sequences and class indices, parallel arrays.
struct EncodedDataset {
    std::vector<TokenSequence> sequences;
    std::vector<std::size_t> labels;

    std::size_t size() const { return sequences.size(); }
    std::string fingerprint() const;
};

}  // namespace rnntc

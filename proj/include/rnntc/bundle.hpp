#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rnntc/corpus.hpp"
#include "rnntc/text.hpp"

namespace rnntc {

inline constexpr int kBundleFormatMajor = 1;

struct PrepareSettings {
    std::uint64_t seed = 1;
    EncodingOptions encoding;
    std::size_t max_vocab = 100000;
    std::vector<std::string> class_names = default_class_names();
    bool synthetic = false;
};

struct RecordCounts {
    std::size_t raw = 0;
    std::size_t retained = 0;
    std::size_t dropped_empty_label = 0;
    std::vector<std::size_t> per_class;

    bool operator==(const RecordCounts&) const = default;
};

/// Encoded corpus ready for training: sequences, labels, vocabulary, split.
struct DatasetBundle {
    PrepareSettings settings;
    RecordCounts counts;
    Vocabulary vocabulary;
    EncodedDataset data;
    DatasetSplit split;
    std::string tables_fingerprint;
};

/// clean_text every narrative, split, build the vocabulary from the training
/// split only, then encode every record. Throws InputError on unknown labels.
DatasetBundle prepare_bundle(const std::vector<RawRecord>& records, const PrepareSettings& settings,
                             const NormalizationTables& tables, std::size_t raw_rows = 0,
                             std::size_t dropped_empty_label = 0);

/// Directory with manifest.json, vocab.csv, sequences.csv and splits.json.
void write_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir);
DatasetBundle read_bundle(const std::filesystem::path& dir);

}  // namespace rnntc

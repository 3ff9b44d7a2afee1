#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rnntc/corpus.hpp"
#include "rnntc/model.hpp"

namespace rnntc {

inline constexpr int kModelFormatMajor = 1;
inline constexpr int kModelFormatMinor = 0;

struct Provenance {
    std::uint64_t seed = 0;
    std::string data_fingerprint;
    std::string vocab_fingerprint;
    std::string tables_fingerprint;
    std::size_t epochs = 0;

    bool operator==(const Provenance&) const = default;
};

/// Everything needed to classify raw narratives: weights, vocabulary, class
/// order and the sequence encoding the weights were trained with.
struct TrainedModel {
    Model model;
    std::vector<std::string> class_names;
    Vocabulary vocabulary;
    EncodingOptions encoding;
    Provenance provenance;

    bool operator==(const TrainedModel& o) const {
        return model == o.model && class_names == o.class_names && vocabulary == o.vocabulary &&
               encoding == o.encoding && provenance == o.provenance;
    }
};

/// Single JSON document; parameters are row-major double arrays keyed by
/// slot name. Doubles are written with round-trip precision.
nlohmann::json model_to_json(const TrainedModel& m);

/// Throws InputError on an unknown major version or inconsistent shapes.
TrainedModel model_from_json(const nlohmann::json& j);

void save_model(const TrainedModel& m, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace rnntc

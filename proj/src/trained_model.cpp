#include "rnntc/trained_model.hpp"

#include <fstream>
#include <sstream>

#include "rnntc/errors.hpp"

namespace rnntc {

namespace {

nlohmann::json config_json(const ModelConfig& c) {
    return {{"cell_kind", std::string(to_string(c.cell_kind))},
            {"vocab_capacity", c.vocab_capacity},
            {"embed_dim", c.embed_dim},
            {"hidden_dim", c.hidden_dim},
            {"dense_dims", c.dense_dims},
            {"n_classes", c.n_classes},
            {"seq_len", c.seq_len},
            {"strict_paper_gru_bias", c.strict_paper_gru_bias},
            {"head_input_dim", c.feature_dim()}};
}

ModelConfig config_from(const nlohmann::json& j) {
    ModelConfig c;
    c.cell_kind = parse_cell_kind(j.at("cell_kind").get<std::string>());
    c.vocab_capacity = j.at("vocab_capacity").get<std::size_t>();
    c.embed_dim = j.at("embed_dim").get<std::size_t>();
    c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    c.dense_dims = j.at("dense_dims").get<std::vector<std::size_t>>();
    c.n_classes = j.at("n_classes").get<std::size_t>();
    c.seq_len = j.at("seq_len").get<std::size_t>();
    c.strict_paper_gru_bias = j.at("strict_paper_gru_bias").get<bool>();
    return c;
}

}  // namespace

nlohmann::json model_to_json(const TrainedModel& m) {
    nlohmann::json params = nlohmann::json::object();
    const ParamSet& p = m.model.params();
    for (std::size_t s = 0; s < p.slots().size(); ++s) {
        const auto& slot = p.slots()[s];
        const auto values = p.vector(s);
        params[slot.name] = {{"rows", slot.rows},
                             {"cols", slot.cols},
                             {"data", std::vector<double>(values.begin(), values.end())}};
    }
    return {{"format", "rnntc-model"},
            {"version", std::to_string(kModelFormatMajor) + "." + std::to_string(kModelFormatMinor)},
            {"config", config_json(m.model.config())},
            {"class_names", m.class_names},
            {"encoding",
             {{"seq_len", m.encoding.seq_len},
              {"pad", std::string(to_string(m.encoding.pad))},
              {"truncate", std::string(to_string(m.encoding.truncate))}}},
            {"vocabulary", m.vocabulary.tokens()},
            {"parameters", std::move(params)},
            {"provenance",
             {{"seed", m.provenance.seed},
              {"data_fingerprint", m.provenance.data_fingerprint},
              {"vocab_fingerprint", m.provenance.vocab_fingerprint},
              {"tables_fingerprint", m.provenance.tables_fingerprint},
              {"epochs", m.provenance.epochs}}}};
}

TrainedModel model_from_json(const nlohmann::json& j) {
    try {
        if (j.value("format", "") != "rnntc-model") {
            throw InputError("not an rnntc model file");
        }
        const auto version = j.at("version").get<std::string>();
        const auto dot = version.find('.');
        int major = -1;
        try {
            major = std::stoi(version.substr(0, dot));
        } catch (const std::exception&) {
            throw InputError("unreadable model format version '" + version + "'");
        }
        if (major != kModelFormatMajor) {
            throw InputError("unsupported model format version " + version + " (this build reads " +
                             std::to_string(kModelFormatMajor) + ".x)");
        }

        const ModelConfig config = config_from(j.at("config"));
        Model model(config);
        const auto& params = j.at("parameters");
        ParamSet& p = model.params();
        if (params.size() != p.slots().size()) {
            throw InputError("model file has " + std::to_string(params.size()) + " parameter tensors, expected " +
                             std::to_string(p.slots().size()));
        }
        for (std::size_t s = 0; s < p.slots().size(); ++s) {
            const auto& slot = p.slots()[s];
            if (!params.contains(slot.name)) {
                throw InputError("model file lacks parameter '" + slot.name + "'");
            }
            const auto& entry = params.at(slot.name);
            const auto data = entry.at("data").get<std::vector<double>>();
            if (entry.at("rows").get<std::size_t>() != slot.rows || entry.at("cols").get<std::size_t>() != slot.cols ||
                data.size() != slot.size()) {
                throw InputError("parameter '" + slot.name + "' has the wrong shape");
            }
            std::copy(data.begin(), data.end(), p.vector(s).begin());
        }

        TrainedModel m{std::move(model), j.at("class_names").get<std::vector<std::string>>(),
                       Vocabulary(j.at("vocabulary").get<std::vector<std::string>>()), {}, {}};
        if (m.class_names.size() != config.n_classes) {
            throw InputError("class list length differs from n_classes");
        }
        if (m.vocabulary.size() != config.vocab_capacity) {
            throw InputError("vocabulary size differs from vocab_capacity");
        }
        const auto& enc = j.at("encoding");
        m.encoding.seq_len = enc.at("seq_len").get<std::size_t>();
        m.encoding.pad = parse_pad_side(enc.at("pad").get<std::string>());
        m.encoding.truncate = parse_truncate_side(enc.at("truncate").get<std::string>());
        if (m.encoding.seq_len != config.seq_len) {
            throw InputError("encoding length differs from model seq_len");
        }
        const auto& prov = j.at("provenance");
        m.provenance.seed = prov.at("seed").get<std::uint64_t>();
        m.provenance.data_fingerprint = prov.at("data_fingerprint").get<std::string>();
        m.provenance.vocab_fingerprint = prov.at("vocab_fingerprint").get<std::string>();
        m.provenance.tables_fingerprint = prov.value("tables_fingerprint", "");
        m.provenance.epochs = prov.at("epochs").get<std::size_t>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed model file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("invalid model configuration: ") + e.what());
    }
}

void save_model(const TrainedModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write model file '" + path.string() + "'");
    }
    out << model_to_json(m).dump(1) << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open model file '" + path.string() + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
    return model_from_json(j);
}

}  // namespace rnntc

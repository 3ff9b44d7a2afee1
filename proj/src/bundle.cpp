#include "rnntc/bundle.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rnntc/csv.hpp"
#include "rnntc/errors.hpp"

namespace rnntc {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write '" + path.string() + "'");
    }
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<TokenId> parse_ids(std::string_view text, std::size_t row) {
    std::vector<TokenId> ids;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && text[pos] == ' ') {
            ++pos;
        }
        if (pos >= text.size()) {
            break;
        }
        TokenId v = 0;
        const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), v);
        if (ec != std::errc{}) {
            throw InputError("sequences.csv row " + std::to_string(row) + ": bad token id");
        }
        ids.push_back(v);
        pos = static_cast<std::size_t>(ptr - text.data());
    }
    return ids;
}

}  // namespace

DatasetBundle prepare_bundle(const std::vector<RawRecord>& records, const PrepareSettings& settings,
                             const NormalizationTables& tables, std::size_t raw_rows, std::size_t dropped_empty_label) {
    DatasetBundle b;
    b.settings = settings;
    b.tables_fingerprint = tables.fingerprint();
    b.counts.raw = raw_rows == 0 ? records.size() + dropped_empty_label : raw_rows;
    b.counts.retained = records.size();
    b.counts.dropped_empty_label = dropped_empty_label;
    b.counts.per_class.assign(settings.class_names.size(), 0);

    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(records.size());
    b.data.labels.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::size_t label = label_index(records[i].label, settings.class_names);
        b.data.labels.push_back(label);
        ++b.counts.per_class[label];
        tokens.push_back(clean_text(records[i].narrative, tables));
    }

    b.split = split_dataset(records.size(), settings.seed);
    std::vector<std::vector<std::string>> train_tokens;
    train_tokens.reserve(b.split.train.size());
    for (const std::size_t i : b.split.train) {
        train_tokens.push_back(tokens[i]);
    }
    b.vocabulary = build_vocabulary(train_tokens, settings.max_vocab);

    b.data.sequences.reserve(records.size());
    for (const auto& doc : tokens) {
        b.data.sequences.push_back(encode_sequence(doc, b.vocabulary, settings.encoding));
    }
    return b;
}

void write_bundle(const DatasetBundle& b, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw InputError("cannot create bundle directory '" + dir.string() + "': " + ec.message());
    }

    const auto& s = b.settings;
    nlohmann::json manifest = {
        {"format", "rnntc-bundle"},
        {"version", fmt::format("{}.0", kBundleFormatMajor)},
        {"seed", s.seed},
        {"synthetic", s.synthetic},
        {"class_names", s.class_names},
        {"encoding",
         {{"seq_len", s.encoding.seq_len},
          {"pad", std::string(to_string(s.encoding.pad))},
          {"truncate", std::string(to_string(s.encoding.truncate))}}},
        {"max_vocab", s.max_vocab},
        {"vocab_size", b.vocabulary.size()},
        {"counts",
         {{"raw", b.counts.raw},
          {"retained", b.counts.retained},
          {"dropped_empty_label", b.counts.dropped_empty_label},
          {"per_class", b.counts.per_class}}},
        {"data_fingerprint", b.data.fingerprint()},
        {"vocab_fingerprint", b.vocabulary.fingerprint()},
        {"tables_fingerprint", b.tables_fingerprint},
    };
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");

    std::string vocab = "id,token,count\n";
    for (std::size_t i = 0; i < b.vocabulary.size(); ++i) {
        const auto count = b.vocabulary.counts().empty() ? 0 : b.vocabulary.counts()[i];
        vocab += fmt::format("{},{},{}\n", i + kFirstTokenId, csv_escape(b.vocabulary.tokens()[i]), count);
    }
    write_text(dir / "vocab.csv", vocab);

    std::string seqs = "label,ids\n";
    for (std::size_t i = 0; i < b.data.size(); ++i) {
        seqs += csv_escape(s.class_names.at(b.data.labels[i]));
        seqs += ',';
        const auto& ids = b.data.sequences[i];
        for (std::size_t t = 0; t < ids.size(); ++t) {
            if (t > 0) {
                seqs += ' ';
            }
            seqs += std::to_string(ids[t]);
        }
        seqs += '\n';
    }
    write_text(dir / "sequences.csv", seqs);

    const nlohmann::json splits = {
        {"seed", b.split.seed}, {"train", b.split.train}, {"validation", b.split.validation}, {"test", b.split.test}};
    write_text(dir / "splits.json", splits.dump() + "\n");
}

DatasetBundle read_bundle(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw InputError("bundle directory '" + dir.string() + "' does not exist");
    }
    DatasetBundle b;
    try {
        const auto manifest = nlohmann::json::parse(read_text(dir / "manifest.json"));
        if (manifest.value("format", "") != "rnntc-bundle") {
            throw InputError("'" + dir.string() + "' is not an rnntc dataset bundle");
        }
        const auto version = manifest.at("version").get<std::string>();
        if (version.substr(0, version.find('.')) != std::to_string(kBundleFormatMajor)) {
            throw InputError("unsupported bundle version " + version);
        }
        auto& s = b.settings;
        s.seed = manifest.at("seed").get<std::uint64_t>();
        s.synthetic = manifest.at("synthetic").get<bool>();
        s.class_names = manifest.at("class_names").get<std::vector<std::string>>();
        const auto& enc = manifest.at("encoding");
        s.encoding.seq_len = enc.at("seq_len").get<std::size_t>();
        s.encoding.pad = parse_pad_side(enc.at("pad").get<std::string>());
        s.encoding.truncate = parse_truncate_side(enc.at("truncate").get<std::string>());
        s.max_vocab = manifest.at("max_vocab").get<std::size_t>();
        const auto& counts = manifest.at("counts");
        b.counts.raw = counts.at("raw").get<std::size_t>();
        b.counts.retained = counts.at("retained").get<std::size_t>();
        b.counts.dropped_empty_label = counts.at("dropped_empty_label").get<std::size_t>();
        b.counts.per_class = counts.at("per_class").get<std::vector<std::size_t>>();
        b.tables_fingerprint = manifest.value("tables_fingerprint", "");

        const auto vocab_rows = parse_csv(read_text(dir / "vocab.csv"));
        std::vector<std::string> tokens;
        std::vector<std::uint64_t> token_counts;
        for (std::size_t r = 1; r < vocab_rows.size(); ++r) {
            const auto& f = vocab_rows[r].fields;
            if (f.size() != 3 || std::stoul(f[0]) != r - 1 + kFirstTokenId) {
                throw InputError("vocab.csv row " + std::to_string(r) + " is malformed");
            }
            tokens.push_back(f[1]);
            token_counts.push_back(std::stoull(f[2]));
        }
        b.vocabulary = Vocabulary(std::move(tokens), std::move(token_counts));

        const auto seq_rows = parse_csv(read_text(dir / "sequences.csv"));
        for (std::size_t r = 1; r < seq_rows.size(); ++r) {
            const auto& f = seq_rows[r].fields;
            if (f.size() != 2) {
                throw InputError("sequences.csv row " + std::to_string(r) + " is malformed");
            }
            b.data.labels.push_back(label_index(f[0], s.class_names));
            auto ids = parse_ids(f[1], r);
            if (ids.size() != s.encoding.seq_len) {
                throw InputError("sequences.csv row " + std::to_string(r) + " has length " +
                                 std::to_string(ids.size()));
            }
            for (const TokenId id : ids) {
                if (id < 0 || static_cast<std::size_t>(id) >= b.vocabulary.id_limit()) {
                    throw InputError("sequences.csv row " + std::to_string(r) + " has an out-of-range id");
                }
            }
            b.data.sequences.push_back(std::move(ids));
        }

        const auto splits = nlohmann::json::parse(read_text(dir / "splits.json"));
        b.split.seed = splits.at("seed").get<std::uint64_t>();
        b.split.train = splits.at("train").get<std::vector<std::size_t>>();
        b.split.validation = splits.at("validation").get<std::vector<std::size_t>>();
        b.split.test = splits.at("test").get<std::vector<std::size_t>>();
        for (const auto* part : {&b.split.train, &b.split.validation, &b.split.test}) {
            for (const std::size_t i : *part) {
                if (i >= b.data.size()) {
                    throw InputError("splits.json references record " + std::to_string(i) + " of " +
                                     std::to_string(b.data.size()));
                }
            }
        }
        if (manifest.at("data_fingerprint").get<std::string>() != b.data.fingerprint()) {
            throw InputError("bundle data does not match its manifest fingerprint");
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed bundle '" + dir.string() + "': " + e.what());
    } catch (const std::logic_error& e) {
        throw InputError("malformed bundle '" + dir.string() + "': " + e.what());
    }
    return b;
}

}  // namespace rnntc

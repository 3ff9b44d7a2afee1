#include "rnntc/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rnntc/bundle.hpp"
#include "rnntc/corpus.hpp"
#include "rnntc/csv.hpp"
#include "rnntc/errors.hpp"
#include "rnntc/metrics.hpp"
#include "rnntc/network.hpp"
#include "rnntc/trained_model.hpp"
#include "rnntc/training.hpp"

namespace rnntc {

namespace fs = std::filesystem;

namespace {

// Desk-scale defaults used with synthetic data.
constexpr std::size_t kDeskSeqLen = 64;
constexpr std::size_t kDeskVocab = 500;
constexpr std::size_t kDeskEmbed = 16;
constexpr std::size_t kDeskHidden = 32;
constexpr double kDeskLearningRate = 0.01;

std::uint64_t default_seed() {
    const char* env = std::getenv("RNNTC_SEED");
    if (env == nullptr || *env == '\0') {
        return 1;
    }
    try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used);
        if (used != std::string_view(env).size()) {
            throw std::invalid_argument(env);
        }
        return v;
    } catch (const std::exception&) {
        throw InputError(std::string("RNNTC_SEED is not an unsigned integer: '") + env + "'");
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!piece.empty()) {
            out.push_back(piece);
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write '" + path.string() + "'");
    }
    out << text;
}

struct PrepareArgs {
    std::string csv;
    bool synthetic = false;
    std::size_t per_class = 50;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::size_t> seq_len;
    std::optional<std::size_t> vocab_size;
    std::string narrative_column = "Summary";
    std::string label_column = "damageLevel";
    std::string classes = "None,Minor,Substantial,Destroyed";
    std::string pad = "pre";
    std::string truncate = "keep-first";
    std::string stopwords;
    std::string lemmas;
};

int cmd_prepare(const PrepareArgs& a, std::ostream& out) {
    if (a.synthetic == !a.csv.empty()) {
        throw InputError("prepare: give exactly one of --csv or --synthetic");
    }
    if (a.stopwords.empty() != a.lemmas.empty()) {
        throw InputError("prepare: --stopwords and --lemmas must be given together");
    }
    const NormalizationTables tables =
        a.stopwords.empty() ? NormalizationTables::bundled() : NormalizationTables::from_files(a.stopwords, a.lemmas);

    PrepareSettings settings;
    settings.seed = a.seed.value_or(default_seed());
    settings.synthetic = a.synthetic;
    settings.class_names = split_list(a.classes);
    if (settings.class_names.size() < 2) {
        throw InputError("prepare: need at least two class names");
    }
    settings.encoding.seq_len = a.seq_len.value_or(a.synthetic ? kDeskSeqLen : 2000);
    settings.encoding.pad = parse_pad_side(a.pad);
    settings.encoding.truncate = parse_truncate_side(a.truncate);
    settings.max_vocab = a.vocab_size.value_or(a.synthetic ? kDeskVocab : 100000);
    if (settings.encoding.seq_len < 1 || settings.max_vocab < 1) {
        throw InputError("prepare: --seq-len and --vocab-size must be positive");
    }

    std::vector<RawRecord> records;
    std::size_t raw = 0;
    std::size_t dropped = 0;
    if (a.synthetic) {
        if (a.per_class < 1) {
            throw InputError("prepare: --per-class must be positive");
        }
        if (settings.class_names != default_class_names()) {
            throw InputError("prepare: the synthetic corpus uses the default four classes");
        }
        records = generate_synthetic_corpus(settings.seed, a.per_class);
        raw = records.size();
    } else {
        auto loaded = load_csv(a.csv, a.narrative_column, a.label_column);
        records = std::move(loaded.records);
        raw = loaded.rows_read;
        dropped = loaded.dropped_empty_label;
    }

    const DatasetBundle bundle = prepare_bundle(records, settings, tables, raw, dropped);
    write_bundle(bundle, a.out);

    out << fmt::format("records: raw={} retained={} dropped_empty_label={}\n", bundle.counts.raw,
                       bundle.counts.retained, bundle.counts.dropped_empty_label);
    for (std::size_t k = 0; k < settings.class_names.size(); ++k) {
        out << fmt::format("  {}: {}\n", settings.class_names[k], bundle.counts.per_class[k]);
    }
    out << fmt::format("split: train={} validation={} test={}\n", bundle.split.train.size(),
                       bundle.split.validation.size(), bundle.split.test.size());
    out << fmt::format("vocabulary: {} tokens (max {}), sequence length {}\n", bundle.vocabulary.size(),
                       settings.max_vocab, settings.encoding.seq_len);
    out << "bundle written to " << a.out << "\n";
    return kExitOk;
}

struct TrainArgs {
    std::string bundle;
    std::string cell;
    std::string out;
    std::string history;
    std::size_t epochs = 20;
    std::size_t batch_size = 32;
    std::optional<std::uint64_t> seed;
    std::optional<double> learning_rate;
    std::optional<std::size_t> embed_dim;
    std::optional<std::size_t> hidden_dim;
    std::string dense = "32";
    bool strict_gru_bias = false;
    bool no_shuffle = false;
    bool quiet = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
    const DatasetBundle bundle = read_bundle(a.bundle);
    ModelConfig mc;
    mc.cell_kind = parse_cell_kind(a.cell);
    mc.vocab_capacity = bundle.vocabulary.size();
    mc.embed_dim = a.embed_dim.value_or(bundle.settings.synthetic ? kDeskEmbed : 64);
    mc.hidden_dim = a.hidden_dim.value_or(bundle.settings.synthetic ? kDeskHidden : 64);
    mc.dense_dims.clear();
    if (a.dense != "none") {
        for (const auto& piece : split_list(a.dense)) {
            try {
                mc.dense_dims.push_back(std::stoul(piece));
            } catch (const std::exception&) {
                throw InputError("train: bad --dense width '" + piece + "'");
            }
        }
    }
    mc.n_classes = bundle.settings.class_names.size();
    mc.seq_len = bundle.settings.encoding.seq_len;
    mc.strict_paper_gru_bias = a.strict_gru_bias;
    try {
        mc.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }

    TrainConfig tc;
    tc.epochs = a.epochs;
    tc.batch_size = a.batch_size;
    tc.seed = a.seed.value_or(default_seed());
    tc.shuffle = !a.no_shuffle;
    tc.adam.learning_rate = a.learning_rate.value_or(bundle.settings.synthetic ? kDeskLearningRate : 0.001);
    try {
        tc.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }

    const EpochObserver progress = [&](const EpochRecord& r, const Model&) {
        if (!a.quiet) {
            out << fmt::format("epoch {:>4}  train_loss {:.6f}  val_loss {:.6f}  val_accuracy {:.4f}\n", r.epoch,
                               r.train_loss, r.val_loss, r.val_accuracy);
        }
        return true;
    };
    TrainResult result = train(bundle.data, bundle.split, mc, tc, progress);

    const SplitScore train_score = evaluate_split(result.model, bundle.data, bundle.split.train);
    TrainedModel tm{std::move(result.model), bundle.settings.class_names, bundle.vocabulary, bundle.settings.encoding,
                    Provenance{tc.seed, bundle.data.fingerprint(), bundle.vocabulary.fingerprint(),
                               bundle.tables_fingerprint, result.history.size()}};
    save_model(tm, a.out);

    fs::path history = a.history;
    if (history.empty()) {
        history = fs::path(a.out).replace_extension(".history.csv");
    }
    write_file(history, history_csv(result.history));

    out << fmt::format("cell {}  head input dim {}  parameters {}\n", display_name(mc.cell_kind), mc.feature_dim(),
                       tm.model.params().size());
    out << fmt::format("final train accuracy {:.4f}  train loss {:.6f}\n", train_score.accuracy,
                       train_score.mean_loss);
    out << "model written to " << a.out << "\nhistory written to " << history.string() << "\n";
    return kExitOk;
}

struct EvalData {
    EncodedDataset data;
    std::vector<std::size_t> indices;
};

EvalData data_from_csv(const TrainedModel& tm, const std::string& path, const std::string& narrative_column,
                       const std::string& label_column) {
    const auto loaded = load_csv(path, narrative_column, label_column);
    const auto tables = NormalizationTables::bundled();
    EvalData d;
    for (const auto& rec : loaded.records) {
        d.data.labels.push_back(label_index(rec.label, tm.class_names));
        d.data.sequences.push_back(encode_sequence(clean_text(rec.narrative, tables), tm.vocabulary, tm.encoding));
        d.indices.push_back(d.indices.size());
    }
    if (d.indices.empty()) {
        throw InputError("'" + path + "' has no labelled records");
    }
    return d;
}

EvalData data_from_bundle(const TrainedModel& tm, const DatasetBundle& bundle, std::ostream& err) {
    if (bundle.settings.class_names != tm.class_names) {
        throw InputError("class set mismatch between model and bundle");
    }
    if (bundle.settings.encoding.seq_len != tm.model.config().seq_len) {
        throw InputError(fmt::format("bundle sequence length {} differs from model's {}",
                                     bundle.settings.encoding.seq_len, tm.model.config().seq_len));
    }
    if (bundle.vocabulary.fingerprint() != tm.provenance.vocab_fingerprint ||
        bundle.vocabulary.id_limit() > tm.model.config().embedding_rows()) {
        err << "warning: bundle vocabulary fingerprint " << bundle.vocabulary.fingerprint()
            << " differs from the model's " << tm.provenance.vocab_fingerprint << "\n";
        if (bundle.vocabulary.id_limit() > tm.model.config().embedding_rows()) {
            throw InputError("bundle token ids exceed the model's embedding table");
        }
    }
    return {bundle.data, bundle.split.test};
}

EvalReport evaluate_report(const TrainedModel& tm, const EvalData& d) {
    const auto preds = predict_classes(tm.model, d.data, d.indices);
    std::vector<std::size_t> truths;
    truths.reserve(d.indices.size());
    for (const std::size_t i : d.indices) {
        truths.push_back(d.data.labels.at(i));
    }
    return make_report(confusion_matrix(truths, preds, tm.class_names.size()), tm.class_names);
}

struct EvaluateArgs {
    std::string model;
    std::string bundle;
    std::string csv;
    std::string narrative_column = "Summary";
    std::string label_column = "damageLevel";
    std::string out_dir;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    if (a.bundle.empty() == a.csv.empty()) {
        throw InputError("evaluate: give exactly one of --bundle or --csv");
    }
    const TrainedModel tm = load_model(a.model);
    const EvalData d = a.bundle.empty() ? data_from_csv(tm, a.csv, a.narrative_column, a.label_column)
                                        : data_from_bundle(tm, read_bundle(a.bundle), err);
    const EvalReport report = evaluate_report(tm, d);
    const std::string text = render_report(report);
    out << text;
    if (!a.out_dir.empty()) {
        const fs::path dir = a.out_dir;
        write_file(dir / "report.txt", text);
        write_file(dir / "report.json", report_to_json(report).dump(2) + "\n");
        write_file(dir / "confusion.csv", confusion_csv(*report.confusion, report.class_names));
        out << "report, JSON and confusion matrix written to " << dir.string() << "\n";
    }
    return kExitOk;
}

struct PredictArgs {
    std::string model;
    std::vector<std::string> texts;
    std::string csv;
    std::string narrative_column = "Summary";
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
    if (a.texts.empty() == a.csv.empty()) {
        throw InputError("predict: give --text (repeatable) or --csv");
    }
    const TrainedModel tm = load_model(a.model);
    std::vector<std::string> inputs = a.texts;
    if (!a.csv.empty()) {
        std::ifstream in(a.csv, std::ios::binary);
        if (!in) {
            throw InputError("cannot open input file '" + a.csv + "'");
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        const auto rows = parse_csv(buf.str());
        if (rows.empty()) {
            throw InputError("'" + a.csv + "' has no header row");
        }
        const auto& header = rows[0].fields;
        const auto col = std::find(header.begin(), header.end(), a.narrative_column);
        if (col == header.end()) {
            throw InputError("missing column '" + a.narrative_column + "' in '" + a.csv + "'");
        }
        const auto c = static_cast<std::size_t>(col - header.begin());
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (rows[r].fields.size() != header.size()) {
                throw InputError(fmt::format("malformed row {} (line {})", r, rows[r].line));
            }
            inputs.push_back(rows[r].fields[c]);
        }
    }

    const auto tables = NormalizationTables::bundled();
    for (std::size_t n = 0; n < inputs.size(); ++n) {
        const auto tokens = clean_text(inputs[n], tables);
        const auto seq = encode_sequence(tokens, tm.vocabulary, tm.encoding);
        const Vector probs = predict_proba(seq, tm.model);
        const std::size_t k = predict(probs);
        nlohmann::ordered_json line;
        line["input"] = n;
        line["class"] = tm.class_names[k];
        line["class_index"] = k;
        nlohmann::ordered_json p;
        for (std::size_t c = 0; c < probs.size(); ++c) {
            p[tm.class_names[c]] = probs[c];
        }
        line["probabilities"] = std::move(p);
        line["empty_input"] = tokens.empty();
        out << line.dump() << "\n";
    }
    return kExitOk;
}

struct CompareArgs {
    std::vector<std::string> models;
    std::string bundle;
    std::string out;
};

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
    const DatasetBundle bundle = read_bundle(a.bundle);
    std::vector<std::pair<std::string, EvalReport>> reports;
    std::optional<std::vector<std::string>> classes;
    std::set<std::string> used;
    for (const auto& path : a.models) {
        const TrainedModel tm = load_model(path);
        if (classes && *classes != tm.class_names) {
            throw InputError("class set of '" + path + "' differs from the other models");
        }
        classes = tm.class_names;
        std::string name(display_name(tm.model.config().cell_kind));
        if (!used.insert(name).second) {
            name += " (" + fs::path(path).filename().string() + ")";
            used.insert(name);
        }
        reports.emplace_back(name, evaluate_report(tm, data_from_bundle(tm, bundle, err)));
    }
    const std::string csv = comparison_csv(compare_models(reports));
    out << csv;
    if (!a.out.empty()) {
        write_file(a.out, csv);
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Recurrent damage-level text classifier", "rnntc"};
    app.require_subcommand(1);

    PrepareArgs prep;
    auto* prepare = app.add_subcommand("prepare", "Clean, encode and split a corpus into a dataset bundle");
    prepare->add_option("--csv", prep.csv, "Input CSV with narrative and label columns");
    prepare->add_flag("--synthetic", prep.synthetic, "Generate the synthetic keyword corpus instead");
    prepare->add_option("--per-class", prep.per_class, "Synthetic records per class")->capture_default_str();
    prepare->add_option("--seed", prep.seed, "Split/generator seed (default $RNNTC_SEED or 1)");
    prepare->add_option("--out", prep.out, "Bundle directory")->required();
    prepare->add_option("--seq-len", prep.seq_len, "Sequence length (2000; 64 with --synthetic)");
    prepare->add_option("--vocab-size", prep.vocab_size, "Vocabulary cap (100000; 500 with --synthetic)");
    prepare->add_option("--narrative-column", prep.narrative_column)->capture_default_str();
    prepare->add_option("--label-column", prep.label_column)->capture_default_str();
    prepare->add_option("--classes", prep.classes, "Comma-separated class order")->capture_default_str();
    prepare->add_option("--pad", prep.pad, "pre or post")->capture_default_str();
    prepare->add_option("--truncate", prep.truncate, "keep-first or keep-last")->capture_default_str();
    prepare->add_option("--stopwords", prep.stopwords, "Replacement stop-word list");
    prepare->add_option("--lemmas", prep.lemmas, "Replacement lemma table");

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train one recurrent classifier on a bundle");
    train_cmd->add_option("--bundle", tr.bundle)->required();
    train_cmd->add_option("--cell", tr.cell, "srnn, gru, lstm or blstm")->required();
    train_cmd->add_option("--out", tr.out, "Model file")->required();
    train_cmd->add_option("--history", tr.history, "History CSV (default <out>.history.csv)");
    train_cmd->add_option("--epochs", tr.epochs)->capture_default_str();
    train_cmd->add_option("--batch-size", tr.batch_size)->capture_default_str();
    train_cmd->add_option("--seed", tr.seed, "Init/shuffle seed (default $RNNTC_SEED or 1)");
    train_cmd->add_option("--learning-rate", tr.learning_rate, "Adam step size (0.001; 0.01 for synthetic bundles)");
    train_cmd->add_option("--embed-dim", tr.embed_dim, "Embedding width (64; 16 for synthetic bundles)");
    train_cmd->add_option("--hidden-dim", tr.hidden_dim, "Recurrent width (64; 32 for synthetic bundles)");
    train_cmd->add_option("--dense", tr.dense, "Comma-separated dense widths, or 'none'")->capture_default_str();
    train_cmd->add_flag("--strict-gru-bias", tr.strict_gru_bias, "GRU without bias terms");
    train_cmd->add_flag("--no-shuffle", tr.no_shuffle, "Keep training order fixed");
    train_cmd->add_flag("--quiet", tr.quiet, "No per-epoch lines");

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Classification report on a bundle's test split or a CSV");
    evaluate->add_option("--model", ev.model)->required();
    evaluate->add_option("--bundle", ev.bundle);
    evaluate->add_option("--csv", ev.csv);
    evaluate->add_option("--narrative-column", ev.narrative_column)->capture_default_str();
    evaluate->add_option("--label-column", ev.label_column)->capture_default_str();
    evaluate->add_option("--out-dir", ev.out_dir, "Write report.txt, report.json and confusion.csv here");

    PredictArgs pr;
    auto* predict_cmd = app.add_subcommand("predict", "Classify narratives");
    predict_cmd->add_option("--model", pr.model)->required();
    predict_cmd->add_option("--text", pr.texts, "Narrative text (repeatable)");
    predict_cmd->add_option("--csv", pr.csv);
    predict_cmd->add_option("--narrative-column", pr.narrative_column)->capture_default_str();

    CompareArgs cmp;
    auto* compare = app.add_subcommand("compare", "Weighted precision/recall/F1 and accuracy per model");
    compare->add_option("--model", cmp.models, "Model files")->required();
    compare->add_option("--bundle", cmp.bundle)->required();
    compare->add_option("--out", cmp.out, "Also write the CSV here");

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("rnntc");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_storage) {
        argv.push_back(s.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        if (prepare->parsed()) {
            return cmd_prepare(prep, out);
        }
        if (train_cmd->parsed()) {
            return cmd_train(tr, out);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(ev, out, err);
        }
        if (predict_cmd->parsed()) {
            return cmd_predict(pr, out);
        }
        if (compare->parsed()) {
            return cmd_compare(cmp, out, err);
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kExitNumericError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}

}  // namespace rnntc

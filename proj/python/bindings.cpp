#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rnntc/activations.hpp"
#include "rnntc/cli.hpp"
#include "rnntc/corpus.hpp"
#include "rnntc/errors.hpp"
#include "rnntc/metrics.hpp"
#include "rnntc/network.hpp"
#include "rnntc/text.hpp"
#include "rnntc/trained_model.hpp"

namespace py = pybind11;
using namespace rnntc;

namespace {

const NormalizationTables& tables() {
    static const NormalizationTables t = NormalizationTables::bundled();
    return t;
}

std::vector<Vector> probabilities(const TrainedModel& tm, const std::vector<std::string>& texts) {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        out.push_back(predict_proba(encode_sequence(clean_text(text, tables()), tm.vocabulary, tm.encoding), tm.model));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Recurrent text classifiers for damage-level prediction";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    m.def(
        "clean_text", [](const std::string& text) { return clean_text(text, tables()); }, py::arg("text"),
        "Normalized, stop-word-free, lemmatized tokens.");
    m.def(
        "synthetic_corpus",
        [](std::uint64_t seed, std::size_t per_class) {
            std::vector<std::tuple<std::string, std::string>> out;
            for (auto& r : generate_synthetic_corpus(seed, per_class)) {
                out.emplace_back(std::move(r.narrative), std::move(r.label));
            }
            return out;
        },
        py::arg("seed"), py::arg("per_class"), "(narrative, label) pairs, per_class of each class.");
    m.def("default_class_names", &default_class_names);
    m.def(
        "softmax", [](const std::vector<double>& logits) { return softmax(logits); }, py::arg("logits"));
    m.def("format_2dp", &format_2dp, py::arg("value"));
    m.def(
        "classification_report",
        [](const std::vector<std::size_t>& truths, const std::vector<std::size_t>& preds,
           std::vector<std::string> class_names) {
            const auto cm = confusion_matrix(truths, preds, class_names.size());
            const auto report = make_report(cm, std::move(class_names));
            return std::make_tuple(report_to_json(report).dump(), render_report(report));
        },
        py::arg("truths"), py::arg("preds"), py::arg("class_names"),
        "(JSON text, rendered table) for integer class indices.");
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return std::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), py::call_guard<py::gil_scoped_release>(),
        "Runs one command-line invocation in process; returns (exit code, stdout, stderr).");

    py::class_<TrainedModel>(m, "TrainedModel")
        .def_static("load", &load_model, py::arg("path"))
        .def("save", [](const TrainedModel& tm, const std::filesystem::path& p) { save_model(tm, p); }, py::arg("path"))
        .def_property_readonly("cell_kind",
                               [](const TrainedModel& tm) { return std::string(display_name(tm.model.config().cell_kind)); })
        .def_readonly("class_names", &TrainedModel::class_names)
        .def_property_readonly("head_input_dim", [](const TrainedModel& tm) { return tm.model.config().feature_dim(); })
        .def_property_readonly("parameter_count", [](const TrainedModel& tm) { return tm.model.params().size(); })
        .def_property_readonly("vocabulary_size", [](const TrainedModel& tm) { return tm.vocabulary.size(); })
        .def_property_readonly("seq_len", [](const TrainedModel& tm) { return tm.encoding.seq_len; })
        .def("predict_proba", &probabilities, py::arg("texts"))
        .def(
            "predict",
            [](const TrainedModel& tm, const std::vector<std::string>& texts) {
                std::vector<std::string> out;
                for (const auto& p : probabilities(tm, texts)) {
                    out.push_back(tm.class_names.at(predict(p)));
                }
                return out;
            },
            py::arg("texts"));
}
